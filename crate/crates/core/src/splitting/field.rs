use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance on the spacing of a tabulated grid.
const UNIFORM_GRID_TOLERANCE: f64 = 1e-12;

/// Scalar driving field `E(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldSignal {
    /// `E(t) = amplitude · sin(angular_frequency · t + phase)`.
    Sinusoid {
        amplitude: f64,
        angular_frequency: f64,
        phase: f64,
    },
    /// Samples on a uniform grid, linearly interpolated.
    Tabulated(TabulatedSignal),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTable", into = "RawTable")]
pub struct TabulatedSignal {
    times: Vec<f64>,
    values: Vec<f64>,
    spacing: f64,
}

#[derive(Serialize, Deserialize)]
struct RawTable {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<RawTable> for TabulatedSignal {
    type Error = Error;

    fn try_from(raw: RawTable) -> Result<Self> {
        TabulatedSignal::new(raw.times, raw.values)
    }
}

impl From<TabulatedSignal> for RawTable {
    fn from(t: TabulatedSignal) -> Self {
        RawTable {
            times: t.times,
            values: t.values,
        }
    }
}

impl TabulatedSignal {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidSignal(format!(
                "{} sample times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.len() < 2 {
            return Err(Error::InvalidSignal(
                "at least two samples are required".into(),
            ));
        }
        if times.iter().chain(&values).any(|x| !x.is_finite()) {
            return Err(Error::InvalidSignal("samples must be finite".into()));
        }
        let n = times.len();
        let spacing = (times[n - 1] - times[0]) / (n - 1) as f64;
        if !(spacing > 0.0) {
            return Err(Error::InvalidSignal("sample times must increase".into()));
        }
        let scale = times[0].abs().max(times[n - 1].abs()).max(spacing);
        for w in times.windows(2) {
            let h = w[1] - w[0];
            if !(h > 0.0) {
                return Err(Error::InvalidSignal(
                    "sample times must increase strictly".into(),
                ));
            }
            if (h - spacing).abs() > UNIFORM_GRID_TOLERANCE * scale {
                return Err(Error::InvalidSignal(format!(
                    "grid is not uniform (step {h} against mean step {spacing})"
                )));
            }
        }
        Ok(Self {
            times,
            values,
            spacing,
        })
    }

    /// Samples `f` at `t0 + k·h` for `k = 0..count`.
    pub fn sample(t0: f64, h: f64, count: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let times: Vec<f64> = (0..count).map(|k| t0 + k as f64 * h).collect();
        let values = times.iter().map(|&t| f(t)).collect();
        Self::new(times, values)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    fn slack(&self) -> f64 {
        UNIFORM_GRID_TOLERANCE * self.start().abs().max(self.end().abs()).max(self.spacing)
    }

    fn check_range(&self, t: f64) -> Result<()> {
        if t < self.start() - self.slack() || t > self.end() + self.slack() || t.is_nan() {
            return Err(Error::OutOfRange {
                t,
                start: self.start(),
                end: self.end(),
            });
        }
        Ok(())
    }

    fn segment(&self, t: f64) -> usize {
        let k = ((t - self.start()) / self.spacing).floor();
        (k.max(0.0) as usize).min(self.times.len() - 2)
    }

    fn interpolate(&self, t: f64) -> f64 {
        let k = self.segment(t);
        let s = (t - self.times[k]) / (self.times[k + 1] - self.times[k]);
        self.values[k] + s * (self.values[k + 1] - self.values[k])
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        self.check_range(t)?;
        Ok(self.interpolate(t))
    }

    /// Trapezoid integral of the interpolant over `[a, b]`.
    fn integral(&self, a: f64, b: f64) -> f64 {
        let first = self.segment(a);
        let last = self.segment(b);
        let mut total = 0.0;
        for k in first..=last {
            let lo = a.max(self.times[k]);
            let hi = b.min(self.times[k + 1]);
            if hi > lo {
                total += 0.5 * (hi - lo) * (self.interpolate(lo) + self.interpolate(hi));
            }
        }
        total
    }
}

impl FieldSignal {
    pub fn sinusoid(amplitude: f64, angular_frequency: f64, phase: f64) -> Self {
        FieldSignal::Sinusoid {
            amplitude,
            angular_frequency,
            phase,
        }
    }

    /// `E(t) = sin(2πt)`.
    pub fn unit_sine() -> Self {
        Self::sinusoid(1.0, 2.0 * std::f64::consts::PI, 0.0)
    }

    pub fn zero() -> Self {
        Self::sinusoid(0.0, 0.0, 0.0)
    }

    pub fn constant(value: f64) -> Self {
        Self::sinusoid(value, 0.0, std::f64::consts::FRAC_PI_2)
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        match self {
            FieldSignal::Sinusoid {
                amplitude,
                angular_frequency,
                phase,
            } => Ok(amplitude * (angular_frequency * t + phase).sin()),
            FieldSignal::Tabulated(table) => table.value(t),
        }
    }

    /// Mean of `E` over `[t_n, t_n + dt]`.
    pub fn average(&self, t_n: f64, dt: f64) -> Result<f64> {
        if !(dt > 0.0 && dt.is_finite()) || !t_n.is_finite() {
            return Err(Error::InvalidPlan(format!(
                "field average needs a finite start and dt > 0 (t = {t_n}, dt = {dt})"
            )));
        }
        match self {
            FieldSignal::Sinusoid {
                amplitude,
                angular_frequency,
                phase,
            } => {
                let half = 0.5 * angular_frequency * dt;
                let mid = angular_frequency * (t_n + 0.5 * dt) + phase;
                Ok(amplitude * mid.sin() * sinc(half))
            }
            FieldSignal::Tabulated(table) => {
                table.check_range(t_n)?;
                table.check_range(t_n + dt)?;
                Ok(table.integral(t_n, t_n + dt) / dt)
            }
        }
    }
}

pub fn field_average(signal: &FieldSignal, t_n: f64, dt: f64) -> Result<f64> {
    signal.average(t_n, dt)
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}
