use num_complex::Complex64;

use crate::density::{DensityMatrix, Diagnostics};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

use super::strang::{StepPlan, StrangIntegrator};

/// Recorded populations, coherences and diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub n_levels: usize,
    pub times: Vec<f64>,
    pub populations: Vec<Vec<f64>>,
    /// Upper triangle `ρ_jk, j < k`, row-major.
    pub coherences: Vec<Vec<Complex64>>,
    pub diagnostics: Vec<Diagnostics>,
    /// Worst diagnostics over every step taken, recorded or not.
    pub extremes: Diagnostics,
}

impl Trajectory {
    pub fn new(n_levels: usize) -> Self {
        Self {
            n_levels,
            times: Vec::new(),
            populations: Vec::new(),
            coherences: Vec::new(),
            diagnostics: Vec::new(),
            extremes: Diagnostics {
                hermiticity_defect: 0.0,
                trace_error: 0.0,
                min_eigenvalue: f64::INFINITY,
            },
        }
    }

    /// Folds a step's diagnostics into [`extremes`](Self::extremes).
    pub fn observe(&mut self, d: &Diagnostics) {
        let e = &mut self.extremes;
        e.hermiticity_defect = e.hermiticity_defect.max(d.hermiticity_defect);
        e.trace_error = e.trace_error.max(d.trace_error);
        e.min_eigenvalue = e.min_eigenvalue.min(d.min_eigenvalue);
    }

    /// Records `rho` at time `t`.
    pub fn push(&mut self, t: f64, rho: &DensityMatrix) {
        let d = rho.diagnostics();
        self.observe(&d);
        self.push_with(t, rho, d);
    }

    fn push_with(&mut self, t: f64, rho: &DensityMatrix, d: Diagnostics) {
        self.times.push(t);
        self.populations.push(rho.populations());
        self.coherences.push(rho.coherences());
        self.diagnostics.push(d);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Rebuilds the recorded state at index `k` from its populations and
    /// upper-triangle coherences (the lower triangle is their conjugate).
    pub fn state(&self, k: usize) -> ComplexMatrix {
        let n = self.n_levels;
        let mut m = ComplexMatrix::from_real_diagonal(&self.populations[k]);
        let mut it = self.coherences[k].iter();
        for j in 0..n {
            for l in j + 1..n {
                let z = *it.next().expect("coherence count matches level count");
                m[(j, l)] = z;
                m[(l, j)] = z.conj();
            }
        }
        m
    }

    pub fn max_trace_error(&self) -> f64 {
        self.extremes.trace_error
    }

    pub fn max_hermiticity_defect(&self) -> f64 {
        self.extremes.hermiticity_defect
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.extremes.min_eigenvalue
    }

    pub fn final_diagnostics(&self) -> Option<&Diagnostics> {
        self.diagnostics.last()
    }

    /// Largest entrywise difference of populations and coherences.
    pub fn max_deviation(&self, other: &Trajectory) -> Result<f64> {
        if self.n_levels != other.n_levels || self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        let pops = self
            .populations
            .iter()
            .flatten()
            .zip(other.populations.iter().flatten())
            .map(|(a, b)| (a - b).abs());
        let cohs = self
            .coherences
            .iter()
            .flatten()
            .zip(other.coherences.iter().flatten())
            .map(|(a, b)| (a - b).norm());
        Ok(pops.chain(cohs).fold(0.0, f64::max))
    }
}

/// Records every step.
pub fn simulate(
    ctx: &StrangIntegrator,
    rho0: &DensityMatrix,
    plan: &StepPlan,
) -> Result<Trajectory> {
    simulate_with_stride(ctx, rho0, plan, 1)
}

/// Records every `stride`-th step plus the final one.
pub fn simulate_with_stride(
    ctx: &StrangIntegrator,
    rho0: &DensityMatrix,
    plan: &StepPlan,
    stride: usize,
) -> Result<Trajectory> {
    check(ctx, rho0, plan)?;
    if stride == 0 {
        return Err(Error::InvalidPlan("record stride must be positive".into()));
    }
    let mut traj = Trajectory::new(rho0.dim());
    traj.push(plan.t0, rho0);
    let mut rho = rho0.clone();
    for n in 0..plan.n_steps {
        rho = advance(ctx, &rho, plan, n)?;
        let d = rho.diagnostics();
        traj.observe(&d);
        let done = n + 1;
        if done % stride == 0 || done == plan.n_steps {
            traj.push_with(plan.time(done), &rho, d);
        }
    }
    Ok(traj)
}

/// Final state only, without diagnostics; the timing path.
pub fn propagate(
    ctx: &StrangIntegrator,
    rho0: &DensityMatrix,
    plan: &StepPlan,
) -> Result<DensityMatrix> {
    check(ctx, rho0, plan)?;
    let mut rho = rho0.clone();
    for n in 0..plan.n_steps {
        rho = advance(ctx, &rho, plan, n)?;
    }
    Ok(rho)
}

fn check(ctx: &StrangIntegrator, rho0: &DensityMatrix, plan: &StepPlan) -> Result<()> {
    if rho0.dim() != ctx.dim() {
        return Err(Error::DimensionMismatch {
            expected: ctx.dim(),
            found: rho0.dim(),
        });
    }
    if (plan.dt - ctx.dt()).abs() > 1e-12 * ctx.dt() {
        return Err(Error::InvalidPlan(format!(
            "plan step {} differs from the integrator step {}",
            plan.dt,
            ctx.dt()
        )));
    }
    Ok(())
}

fn advance(
    ctx: &StrangIntegrator,
    rho: &DensityMatrix,
    plan: &StepPlan,
    n: usize,
) -> Result<DensityMatrix> {
    ctx.step(rho, plan.time(n)).map_err(|e| Error::StepFailed {
        step: n,
        source: Box::new(e),
    })
}
