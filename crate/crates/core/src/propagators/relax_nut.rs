//! Exact half step of the relaxation–nutation flow.
//!
//! The flow is linear and time invariant. Coherences evolve independently as
//! `ρ_jk ← e^{(−iω_jk − γ_jk) h} ρ_jk`, and populations follow the rate system
//! `dP/dt = (W − diag Γ) P` with `Γ_j = Σ_k W_kj`. Both channels are evaluated
//! once per step size.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{series_exponential, ComplexMatrix, SERIES_TOLERANCE};
use crate::system::LevelSystem;

/// Linear relaxation operator `Q(ρ)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RelaxationModel {
    #[default]
    None,
    /// Pauli master-equation rates plus pure coherence damping.
    Pauli {
        /// `pop_rates[j][k]`: transition rate from level `k` to level `j`.
        pop_rates: Vec<Vec<f64>>,
        /// Symmetric coherence damping rates `γ_jk`.
        coh_rates: Vec<Vec<f64>>,
    },
}

impl RelaxationModel {
    /// Total decay rate out of each level, `Γ_j = Σ_k W_kj`.
    pub fn decay_rates(&self, n: usize) -> Vec<f64> {
        match self {
            RelaxationModel::None => vec![0.0; n],
            RelaxationModel::Pauli { pop_rates, .. } => (0..n)
                .map(|j| (0..n).filter(|&k| k != j).map(|k| pop_rates[k][j]).sum())
                .collect(),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let RelaxationModel::Pauli {
            pop_rates,
            coh_rates,
        } = self
        else {
            return Ok(());
        };
        for (name, m) in [("pop_rates", pop_rates), ("coh_rates", coh_rates)] {
            if m.len() != n || m.iter().any(|row| row.len() != n) {
                return Err(Error::InvalidRates(format!("{name} must be {n}x{n}")));
            }
            for (j, row) in m.iter().enumerate() {
                for (k, &r) in row.iter().enumerate() {
                    if !r.is_finite() || r < 0.0 {
                        return Err(Error::InvalidRates(format!(
                            "{name}[{j}][{k}] = {r} must be finite and nonnegative"
                        )));
                    }
                    if j == k && r != 0.0 {
                        return Err(Error::InvalidRates(format!(
                            "{name} must have a zero diagonal"
                        )));
                    }
                }
            }
        }
        let decay = self.decay_rates(n);
        for j in 0..n {
            for k in j + 1..n {
                if coh_rates[j][k] != coh_rates[k][j] {
                    return Err(Error::InvalidRates(format!(
                        "coh_rates must be symmetric (entries [{j}][{k}] and [{k}][{j}] differ)"
                    )));
                }
                let floor = 0.5 * (decay[j] + decay[k]);
                if coh_rates[j][k] < floor {
                    return Err(Error::InvalidRates(format!(
                        "coherence damping γ[{j}][{k}] = {} is below ½(Γ_{j} + Γ_{k}) = {floor}",
                        coh_rates[j][k]
                    )));
                }
            }
        }
        Ok(())
    }

    fn coherence_rate(&self, j: usize, k: usize) -> f64 {
        match self {
            RelaxationModel::None => 0.0,
            RelaxationModel::Pauli { coh_rates, .. } => coh_rates[j][k],
        }
    }

    /// `W − diag(Γ)`; columns sum to zero.
    fn rate_matrix(&self, n: usize) -> ComplexMatrix {
        let mut r = ComplexMatrix::zeros(n);
        if let RelaxationModel::Pauli { pop_rates, .. } = self {
            let decay = self.decay_rates(n);
            for j in 0..n {
                for k in 0..n {
                    let w = if j == k { -decay[j] } else { pop_rates[j][k] };
                    r[(j, k)] = Complex64::new(w, 0.0);
                }
            }
        }
        r
    }
}

#[derive(Debug, Clone)]
pub struct RelaxNutPropagator {
    coh_phase: ComplexMatrix,
    pop_half_step: Vec<Vec<f64>>,
    dt: f64,
}

impl RelaxNutPropagator {
    pub fn new(sys: &LevelSystem, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidPlan(format!(
                "step size must be positive, got {dt}"
            )));
        }
        let n = sys.n_levels();
        let relax = sys.relaxation();
        relax.validate(n)?;
        let omega = sys.omega();
        let h = 0.5 * dt;

        let mut coh_phase = ComplexMatrix::identity(n);
        for j in 0..n {
            for k in 0..n {
                if j != k {
                    let rate = Complex64::new(-relax.coherence_rate(j, k), -(omega[j] - omega[k]));
                    coh_phase[(j, k)] = (rate * h).exp();
                }
            }
        }

        let pop = series_exponential(&relax.rate_matrix(n).scale_real(h), SERIES_TOLERANCE);
        let pop_half_step = (0..n)
            .map(|j| (0..n).map(|k| pop[(j, k)].re).collect())
            .collect();

        Ok(Self {
            coh_phase,
            pop_half_step,
            dt,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn coh_phase(&self) -> &ComplexMatrix {
        &self.coh_phase
    }

    pub fn pop_half_step(&self) -> &[Vec<f64>] {
        &self.pop_half_step
    }

    /// Applies `exp(L Δt/2)`.
    pub fn half_step(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let n = self.coh_phase.dim();
        if rho.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: rho.dim(),
            });
        }
        let mut out = rho.matrix().hadamard(&self.coh_phase);
        for j in 0..n {
            let pop: f64 = (0..n)
                .map(|k| self.pop_half_step[j][k] * rho.matrix()[(k, k)].re)
                .sum();
            out[(j, j)] = Complex64::new(pop, rho.matrix()[(j, j)].im);
        }
        Ok(DensityMatrix::from_evolved(out))
    }
}

pub fn build_relax_nut(sys: &LevelSystem, dt: f64) -> Result<RelaxNutPropagator> {
    RelaxNutPropagator::new(sys, dt)
}

pub fn relax_nut_half_step(
    prop: &RelaxNutPropagator,
    rho: &DensityMatrix,
) -> Result<DensityMatrix> {
    prop.half_step(rho)
}
