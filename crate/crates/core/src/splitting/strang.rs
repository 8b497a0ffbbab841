use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::propagators::{LiouvilleStrategy, RelaxNutPropagator};
use crate::system::LevelSystem;

use super::field::FieldSignal;

/// Uniform time grid `t_n = t0 + n·dt`, `n = 0..=n_steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPlan {
    pub t0: f64,
    pub dt: f64,
    pub n_steps: usize,
    /// Steps per field period, when the plan was built from one.
    pub n_p: Option<usize>,
}

impl StepPlan {
    pub fn new(t0: f64, dt: f64, n_steps: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) || !t0.is_finite() {
            return Err(Error::InvalidPlan(format!(
                "need a finite start and dt > 0 (t0 = {t0}, dt = {dt})"
            )));
        }
        Ok(Self {
            t0,
            dt,
            n_steps,
            n_p: None,
        })
    }

    /// `n_p` steps per unit period over `periods` periods, starting at zero.
    pub fn periodic(n_p: usize, periods: usize) -> Result<Self> {
        if n_p == 0 {
            return Err(Error::InvalidPlan("n_p must be positive".into()));
        }
        let mut plan = Self::new(0.0, 1.0 / n_p as f64, n_p * periods)?;
        plan.n_p = Some(n_p);
        Ok(plan)
    }

    /// Steps of size `dt` covering `[0, t_end]`; `t_end/dt` must be an integer.
    pub fn covering(t_end: f64, dt: f64) -> Result<Self> {
        let steps = t_end / dt;
        let rounded = steps.round();
        if !(rounded >= 0.0) || (steps - rounded).abs() > 1e-9 * rounded.max(1.0) {
            return Err(Error::InvalidPlan(format!(
                "t_end = {t_end} is not a whole number of steps of {dt}"
            )));
        }
        Self::new(0.0, dt, rounded as usize)
    }

    pub fn time(&self, n: usize) -> f64 {
        self.t0 + n as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.n_steps)
    }
}

/// Everything one Strang step needs: the relaxation–nutation half-step, the
/// Liouville strategy and the field.
#[derive(Debug, Clone)]
pub struct StrangIntegrator {
    relax: RelaxNutPropagator,
    strategy: LiouvilleStrategy,
    field: FieldSignal,
}

impl StrangIntegrator {
    pub fn new(
        sys: &LevelSystem,
        strategy: LiouvilleStrategy,
        field: FieldSignal,
        dt: f64,
    ) -> Result<Self> {
        if strategy.dim() != sys.n_levels() {
            return Err(Error::DimensionMismatch {
                expected: sys.n_levels(),
                found: strategy.dim(),
            });
        }
        Ok(Self {
            relax: RelaxNutPropagator::new(sys, dt)?,
            strategy,
            field,
        })
    }

    pub fn dt(&self) -> f64 {
        self.relax.dt()
    }

    pub fn dim(&self) -> usize {
        self.strategy.dim()
    }

    pub fn strategy(&self) -> &LiouvilleStrategy {
        &self.strategy
    }

    pub fn field(&self) -> &FieldSignal {
        &self.field
    }

    pub fn relax_nut(&self) -> &RelaxNutPropagator {
        &self.relax
    }

    /// Advances `rho` from `t_n` to `t_n + dt`:
    /// half relaxation–nutation, full Liouville, half relaxation–nutation.
    pub fn step(&self, rho: &DensityMatrix, t_n: f64) -> Result<DensityMatrix> {
        let dt = self.dt();
        let gamma = dt * self.field.average(t_n, dt)?;
        let a = self.relax.half_step(rho)?;
        let b = self.strategy.liouville_step(&a, gamma)?;
        self.relax.half_step(&b)
    }
}

pub fn strang_step(
    ctx: &StrangIntegrator,
    rho: &DensityMatrix,
    t_n: f64,
    dt: f64,
) -> Result<DensityMatrix> {
    if (dt - ctx.dt()).abs() > 1e-12 * ctx.dt() {
        return Err(Error::InvalidPlan(format!(
            "step {dt} differs from the integrator step {}",
            ctx.dt()
        )));
    }
    ctx.step(rho, t_n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexMatrix;
    use crate::propagators::{Method, RelaxationModel};
    use crate::spectral::SpectralData;
    use num_complex::Complex64;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn p3() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[
            vec![0.0, 1.0, 1.1],
            vec![1.0, 0.0, 1.0],
            vec![1.1, 1.0, 0.0],
        ])
        .unwrap()
    }

    fn integrator(
        omega: Vec<f64>,
        method: Method,
        field: FieldSignal,
        dt: f64,
    ) -> StrangIntegrator {
        let sys = LevelSystem::new(omega, p3(), RelaxationModel::None).unwrap();
        let spec = Arc::new(SpectralData::new(&p3(), None).unwrap());
        StrangIntegrator::new(
            &sys,
            LiouvilleStrategy::new(method, spec).unwrap(),
            field,
            dt,
        )
        .unwrap()
    }

    fn coherent_state() -> DensityMatrix {
        let mut m = ComplexMatrix::from_real_diagonal(&[0.5, 0.3, 0.2]);
        m[(0, 1)] = Complex64::new(0.1, 0.05);
        m[(1, 0)] = m[(0, 1)].conj();
        m[(1, 2)] = Complex64::new(-0.05, 0.02);
        m[(2, 1)] = m[(1, 2)].conj();
        DensityMatrix::new(m).unwrap()
    }

    #[test]
    fn plan_construction() {
        let plan = StepPlan::periodic(20, 3).unwrap();
        assert_eq!(plan.n_steps, 60);
        assert_eq!(plan.dt, 0.05);
        assert!((plan.t_end() - 3.0).abs() < 1e-15);
        assert!(StepPlan::periodic(0, 3).is_err());
        assert!(StepPlan::new(0.0, -0.1, 3).is_err());
        assert_eq!(StepPlan::covering(1.0, 1.0 / 80.0).unwrap().n_steps, 80);
        assert!(StepPlan::covering(1.0, 0.3).is_err());
    }

    #[test]
    fn zero_field_without_frequencies_is_identity() {
        let ctx = integrator(vec![0.0; 3], Method::Newton, FieldSignal::zero(), 0.05);
        let rho = coherent_state();
        assert_eq!(ctx.step(&rho, 0.0).unwrap(), rho);
    }

    #[test]
    fn zero_field_rotates_coherences_by_full_step() {
        let omega = vec![0.0, PI, 2.0 * PI];
        let dt = 0.05;
        let ctx = integrator(omega.clone(), Method::Exponential, FieldSignal::zero(), dt);
        let rho = coherent_state();
        let out = ctx.step(&rho, 0.0).unwrap();
        for j in 0..3 {
            assert_eq!(out.matrix()[(j, j)], rho.matrix()[(j, j)]);
            for k in 0..3 {
                let phase = Complex64::new(0.0, -(omega[j] - omega[k]) * dt).exp();
                assert!((out.matrix()[(j, k)] - rho.matrix()[(j, k)] * phase).norm() < 1e-16);
            }
        }
    }

    #[test]
    fn newton_step_matches_exponential_step() {
        let omega = vec![0.0, PI, 2.0 * PI];
        let rho = DensityMatrix::pure_level(3, 0).unwrap();
        let exp = integrator(
            omega.clone(),
            Method::Exponential,
            FieldSignal::unit_sine(),
            0.05,
        );
        let newton = integrator(omega, Method::Newton, FieldSignal::unit_sine(), 0.05);
        let a = exp.step(&rho, 0.1).unwrap();
        let b = newton.step(&rho, 0.1).unwrap();
        assert!((a.matrix() - b.matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn step_size_must_match() {
        let ctx = integrator(vec![0.0; 3], Method::Newton, FieldSignal::zero(), 0.05);
        let rho = coherent_state();
        assert!(strang_step(&ctx, &rho, 0.0, 0.05).is_ok());
        assert!(matches!(
            strang_step(&ctx, &rho, 0.0, 0.1),
            Err(Error::InvalidPlan(_))
        ));
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let sys = LevelSystem::new(
            vec![0.0, 1.0],
            ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(),
            RelaxationModel::None,
        )
        .unwrap();
        let spec = Arc::new(SpectralData::new(&p3(), None).unwrap());
        let strategy = LiouvilleStrategy::new(Method::Newton, spec).unwrap();
        assert!(StrangIntegrator::new(&sys, strategy, FieldSignal::zero(), 0.1).is_err());
    }
}
