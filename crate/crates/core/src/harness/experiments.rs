use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use super::config::ExperimentConfig;
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::propagators::{
    nsfd_report, ExponentialRoute, LiouvilleStrategy, Method, NewtonEvaluation, NsfdReport,
};
use crate::spectral::{spectral_precompute, SpectralData};
use crate::splitting::{
    convergence_order_with_reference, propagate, simulate_with_stride, ConvergenceReport, StepPlan,
    StrangIntegrator, Trajectory,
};
use crate::system::LevelSystem;

/// Smallest eigenvalue below which a run counts as having lost positivity.
pub const POSITIVITY_THRESHOLD: f64 = -1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    PositivityViolated,
    Error,
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunStatus::Ok => "ok",
            RunStatus::PositivityViolated => "positivity_violated",
            RunStatus::Error => "error",
        })
    }
}

/// Whether [`BenchmarkRow::size`] counts steps per period or levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeKind {
    StepsPerPeriod,
    Levels,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkRow {
    pub method: String,
    pub size_kind: SizeKind,
    pub size: usize,
    pub steps: usize,
    /// Fastest timed propagation, offline phase excluded.
    pub wall_time: f64,
    /// Eigendecomposition and Newton basis.
    pub offline_time: f64,
    pub final_trace_error: f64,
    pub min_eigenvalue_overall: f64,
    /// Largest entrywise distance from the Exponential run, when compared.
    pub max_deviation: Option<f64>,
    pub status: RunStatus,
    pub message: Option<String>,
}

impl BenchmarkRow {
    fn failed(method: String, size_kind: SizeKind, size: usize, err: &Error) -> Self {
        Self {
            method,
            size_kind,
            size,
            steps: 0,
            wall_time: 0.0,
            offline_time: 0.0,
            final_trace_error: f64::NAN,
            min_eigenvalue_overall: f64::NAN,
            max_deviation: None,
            status: RunStatus::Error,
            message: Some(err.to_string()),
        }
    }

    pub fn time_per_step(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.wall_time / self.steps as f64
        }
    }
}

/// Positivity status of a finished trajectory.
pub fn classify(traj: &Trajectory) -> RunStatus {
    if traj.min_eigenvalue() < POSITIVITY_THRESHOLD {
        RunStatus::PositivityViolated
    } else {
        RunStatus::Ok
    }
}

/// A Liouville strategy together with the route it evaluates by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Variant {
    pub method: Method,
    pub exponential_route: ExponentialRoute,
    pub newton_evaluation: NewtonEvaluation,
}

impl Variant {
    pub fn of(method: Method) -> Self {
        Self {
            method,
            exponential_route: ExponentialRoute::default(),
            newton_evaluation: NewtonEvaluation::default(),
        }
    }

    pub fn series_exponential() -> Self {
        Self {
            exponential_route: ExponentialRoute::Series,
            ..Self::of(Method::Exponential)
        }
    }

    pub fn newton_horner() -> Self {
        Self {
            newton_evaluation: NewtonEvaluation::Horner,
            ..Self::of(Method::Newton)
        }
    }

    pub fn label(&self) -> String {
        match (self.method, self.exponential_route, self.newton_evaluation) {
            (Method::Exponential, ExponentialRoute::Series, _) => "Exponential (series)".into(),
            (Method::Newton, _, NewtonEvaluation::Horner) => "Newton (Horner)".into(),
            (m, _, _) => m.label().into(),
        }
    }

    pub fn strategy(&self, spec: Arc<SpectralData>) -> Result<LiouvilleStrategy> {
        Ok(LiouvilleStrategy::new(self.method, spec)?
            .with_exponential_route(self.exponential_route)
            .with_newton_evaluation(self.newton_evaluation))
    }
}

/// One system prepared for repeated runs.
pub struct Setup {
    pub system: LevelSystem,
    pub spectral: Arc<SpectralData>,
    pub offline_time: f64,
    pub rho0: DensityMatrix,
}

impl Setup {
    pub fn new(system: LevelSystem, rho0: DensityMatrix) -> Result<Self> {
        let start = Instant::now();
        let spectral = Arc::new(spectral_precompute(&system, None)?);
        Ok(Self {
            system,
            spectral,
            offline_time: start.elapsed().as_secs_f64(),
            rho0,
        })
    }

    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        let system = cfg.system()?;
        let rho0 = cfg.initial_state(system.n_levels())?;
        Self::new(system, rho0)
    }

    pub fn integrator(
        &self,
        variant: Variant,
        cfg: &ExperimentConfig,
        dt: f64,
    ) -> Result<StrangIntegrator> {
        StrangIntegrator::new(
            &self.system,
            variant.strategy(self.spectral.clone())?,
            cfg.field.clone(),
            dt,
        )
    }
}

/// Times `repeats` propagations and returns the fastest, in seconds.
fn time_propagation(
    ctx: &StrangIntegrator,
    rho0: &DensityMatrix,
    plan: &StepPlan,
    repeats: usize,
) -> Result<f64> {
    Ok(time_interleaved(&[ctx], rho0, plan, repeats)?[0])
}

/// Fastest propagation time of each integrator, alternating between them on
/// every repeat so that drift in machine speed affects all of them alike.
fn time_interleaved(
    ctxs: &[&StrangIntegrator],
    rho0: &DensityMatrix,
    plan: &StepPlan,
    repeats: usize,
) -> Result<Vec<f64>> {
    let mut best = vec![f64::INFINITY; ctxs.len()];
    for _ in 0..repeats.max(1) {
        for (ctx, b) in ctxs.iter().zip(best.iter_mut()) {
            let start = Instant::now();
            std::hint::black_box(propagate(ctx, rho0, plan)?);
            *b = b.min(start.elapsed().as_secs_f64());
        }
    }
    Ok(best)
}

/// Simulates with diagnostics, then times the bare propagation.
fn benchmark(
    setup: &Setup,
    variant: Variant,
    cfg: &ExperimentConfig,
    plan: &StepPlan,
    size_kind: SizeKind,
    size: usize,
) -> Result<(Trajectory, BenchmarkRow)> {
    let ctx = setup.integrator(variant, cfg, plan.dt)?;
    let traj = simulate_with_stride(&ctx, &setup.rho0, plan, cfg.record_stride)?;
    let wall_time = time_propagation(&ctx, &setup.rho0, plan, cfg.timing_repeats)?;
    let row = BenchmarkRow {
        method: variant.label(),
        size_kind,
        size,
        steps: plan.n_steps,
        wall_time,
        offline_time: setup.offline_time,
        final_trace_error: traj.final_diagnostics().map_or(f64::NAN, |d| d.trace_error),
        min_eigenvalue_overall: traj.min_eigenvalue(),
        max_deviation: None,
        status: classify(&traj),
        message: None,
    };
    Ok((traj, row))
}

/// Driven three-level run of `cfg.method` (or any system `cfg` describes).
pub fn run_three_level(cfg: &ExperimentConfig) -> Result<(Trajectory, BenchmarkRow)> {
    cfg.validate()?;
    let setup = Setup::from_config(cfg)?;
    let plan = cfg.plan()?;
    benchmark(
        &setup,
        Variant::of(cfg.method),
        cfg,
        &plan,
        SizeKind::StepsPerPeriod,
        cfg.n_p,
    )
}

#[derive(Debug, Clone)]
pub struct DegenerateReport {
    pub rows: Vec<BenchmarkRow>,
    /// Trajectories of the methods that completed, keyed by method.
    pub trajectories: Vec<(Method, Trajectory)>,
}

/// Exponential, Newton and Canonical3 on the configured (by default
/// degenerate) system. Failures are recorded per method.
pub fn run_degenerate(cfg: &ExperimentConfig) -> Result<DegenerateReport> {
    cfg.validate()?;
    let setup = Setup::from_config(cfg)?;
    let plan = cfg.plan()?;
    let methods = [Method::Exponential, Method::Newton, Method::Canonical3];
    let run = |m: Method| -> Result<(Trajectory, BenchmarkRow)> {
        benchmark(
            &setup,
            Variant::of(m),
            cfg,
            &plan,
            SizeKind::StepsPerPeriod,
            cfg.n_p,
        )
    };
    let results: Vec<Result<(Trajectory, BenchmarkRow)>> = if cfg.parallel {
        std::thread::scope(|s| {
            let handles: Vec<_> = methods.iter().map(|&m| s.spawn(move || run(m))).collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("degenerate worker panicked"))
                .collect()
        })
    } else {
        methods.iter().map(|&m| run(m)).collect()
    };

    let mut results = methods.into_iter().zip(results);
    let (_, first) = results.next().expect("three methods");
    let (reference, mut row) = first?;
    row.max_deviation = Some(0.0);
    let mut rows = vec![row];
    let mut trajectories = Vec::new();
    for (m, result) in results {
        match result {
            Ok((traj, mut row)) => {
                row.max_deviation = Some(traj.max_deviation(&reference)?);
                rows.push(row);
                trajectories.push((m, traj));
            }
            Err(e) => rows.push(BenchmarkRow::failed(
                m.label().into(),
                SizeKind::StepsPerPeriod,
                cfg.n_p,
                &e,
            )),
        }
    }
    trajectories.insert(0, (Method::Exponential, reference));
    Ok(DegenerateReport { rows, trajectories })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRatio {
    pub levels: usize,
    /// Newton (Horner) time over series-exponential time.
    pub horner_over_series: f64,
    /// Newton (cached basis) time over series-exponential time.
    pub cached_over_series: f64,
}

#[derive(Debug, Clone)]
pub struct ScalingReport {
    pub rows: Vec<BenchmarkRow>,
    pub ratios: Vec<ScalingRatio>,
}

/// Series exponential against both Newton routes for each level count in
/// `cfg.levels`, on seeded random polarizabilities. Runs are sequential.
pub fn run_scaling(cfg: &ExperimentConfig) -> Result<ScalingReport> {
    cfg.validate()?;
    let plan = cfg.plan()?;
    let variants = [
        Variant::series_exponential(),
        Variant::newton_horner(),
        Variant::of(Method::Newton),
    ];
    let mut rows = Vec::new();
    let mut ratios = Vec::new();
    for &n in &cfg.levels {
        let system = cfg.system_for(n)?;
        let rho0 = DensityMatrix::pure_level(system.n_levels(), 0)?;
        let setup = Setup::new(system, rho0)?;
        let ctxs = variants
            .iter()
            .map(|&v| setup.integrator(v, cfg, plan.dt))
            .collect::<Result<Vec<_>>>()?;
        let refs: Vec<&StrangIntegrator> = ctxs.iter().collect();
        let times = time_interleaved(&refs, &setup.rho0, &plan, cfg.timing_repeats)?;
        for ((v, ctx), &wall_time) in variants.iter().zip(&ctxs).zip(&times) {
            let traj = simulate_with_stride(ctx, &setup.rho0, &plan, cfg.record_stride)?;
            rows.push(BenchmarkRow {
                method: v.label(),
                size_kind: SizeKind::Levels,
                size: n,
                steps: plan.n_steps,
                wall_time,
                offline_time: setup.offline_time,
                final_trace_error: traj.final_diagnostics().map_or(f64::NAN, |d| d.trace_error),
                min_eigenvalue_overall: traj.min_eigenvalue(),
                max_deviation: None,
                status: classify(&traj),
                message: None,
            });
        }
        ratios.push(ScalingRatio {
            levels: n,
            horner_over_series: times[1] / times[0],
            cached_over_series: times[2] / times[0],
        });
    }
    Ok(ScalingReport { rows, ratios })
}

/// Whether a sequence never decreases.
pub fn is_monotone_non_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] >= w[0])
}

/// One row per (method, n_p) over `cfg.table_np` on the configured system.
/// Deviations are measured against the Exponential run at the same n_p.
pub fn run_crank_nicolson_table(cfg: &ExperimentConfig) -> Result<Vec<BenchmarkRow>> {
    cfg.validate()?;
    let setup = Setup::from_config(cfg)?;
    let mut rows = Vec::new();
    for &n_p in &cfg.table_np {
        let plan = StepPlan::periodic(n_p, cfg.periods)?;
        let mut reference: Option<Trajectory> = None;
        for m in Method::ALL {
            match benchmark(
                &setup,
                Variant::of(m),
                cfg,
                &plan,
                SizeKind::StepsPerPeriod,
                n_p,
            ) {
                Ok((traj, mut row)) => {
                    match &reference {
                        Some(r) => row.max_deviation = Some(traj.max_deviation(r)?),
                        None => {
                            row.max_deviation = Some(0.0);
                            reference = Some(traj);
                        }
                    }
                    rows.push(row);
                }
                Err(e) => rows.push(BenchmarkRow::failed(
                    m.label().into(),
                    SizeKind::StepsPerPeriod,
                    n_p,
                    &e,
                )),
            }
        }
    }
    Ok(rows)
}

/// Number of halvings of the convergence ladder, starting from `1/n_p`.
pub const CONVERGENCE_LEVELS: usize = 4;

/// Order of `cfg.method` on the ladder `1/n_p, 1/(2n_p), …` against an
/// Exponential reference at the finest step over 8, over `cfg.periods`.
pub fn run_convergence(cfg: &ExperimentConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let setup = Setup::from_config(cfg)?;
    let dts: Vec<f64> = (0..CONVERGENCE_LEVELS)
        .map(|k| 1.0 / (cfg.n_p << k) as f64)
        .collect();
    let factory = |dt| setup.integrator(Variant::of(cfg.method), cfg, dt);
    let reference = |dt| setup.integrator(Variant::of(Method::Exponential), cfg, dt);
    convergence_order_with_reference(
        factory,
        reference,
        &setup.rho0,
        cfg.periods as f64,
        &dts,
        cfg.parallel,
    )
}

/// NSFD quantities over the ladder `1/n_p, 1/(2n_p), …` at field `e_field`.
pub fn run_nsfd_sweep(
    cfg: &ExperimentConfig,
    e_field: f64,
    levels: usize,
) -> Result<Vec<NsfdReport>> {
    cfg.validate()?;
    let system = cfg.system()?;
    let spec = spectral_precompute(&system, None)?;
    (0..levels)
        .map(|k| nsfd_report(1.0 / (cfg.n_p << k) as f64, e_field, &spec))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::ExperimentKind;

    fn short(kind: ExperimentKind) -> ExperimentConfig {
        ExperimentConfig {
            periods: 2,
            timing_repeats: 1,
            ..ExperimentConfig::preset(kind)
        }
    }

    #[test]
    fn three_level_row_is_consistent() {
        let cfg = ExperimentConfig {
            method: Method::Newton,
            ..short(ExperimentKind::ThreeLevel)
        };
        let (traj, row) = run_three_level(&cfg).unwrap();
        assert_eq!(traj.len(), 41);
        assert_eq!(row.steps, 40);
        assert_eq!(row.status, RunStatus::Ok);
        assert!(row.wall_time >= 0.0 && row.offline_time >= 0.0);
        assert!(row.final_trace_error < 1e-12);
        assert_eq!(row.method, "Newton");
    }

    #[test]
    fn coarse_crank_nicolson_loses_positivity() {
        let cfg = ExperimentConfig {
            method: Method::CrankNicolson,
            n_p: 5,
            ..short(ExperimentKind::ThreeLevel)
        };
        let (_, row) = run_three_level(&cfg).unwrap();
        assert_eq!(row.status, RunStatus::PositivityViolated);
    }

    #[test]
    fn degenerate_report() {
        let cfg = short(ExperimentKind::Degenerate);
        for parallel in [false, true] {
            let report = run_degenerate(&ExperimentConfig {
                parallel,
                ..cfg.clone()
            })
            .unwrap();
            let statuses: Vec<_> = report.rows.iter().map(|r| r.status).collect();
            assert_eq!(statuses, [RunStatus::Ok, RunStatus::Ok, RunStatus::Error]);
            assert_eq!(report.rows[0].max_deviation, Some(0.0));
            assert!(report.rows[1].max_deviation.unwrap() <= 1e-9);
            assert!(report.rows[2]
                .message
                .as_ref()
                .unwrap()
                .contains("degenerate"));
            assert_eq!(report.trajectories.len(), 2);
        }
    }

    #[test]
    fn table_rows_cover_methods_and_resolutions() {
        let cfg = ExperimentConfig {
            table_np: vec![5, 20],
            ..short(ExperimentKind::ThreeLevel)
        };
        let rows = run_crank_nicolson_table(&cfg).unwrap();
        assert_eq!(rows.len(), 8);
        for row in &rows {
            let expected = if row.method == "Crank-Nicolson" {
                RunStatus::PositivityViolated
            } else {
                RunStatus::Ok
            };
            assert_eq!(row.status, expected, "{row:?}");
        }
    }

    #[test]
    fn scaling_rows_and_ratios() {
        let cfg = ExperimentConfig {
            levels: vec![2, 3],
            ..short(ExperimentKind::Scaling)
        };
        let report = run_scaling(&cfg).unwrap();
        assert_eq!(report.rows.len(), 6);
        assert_eq!(report.ratios.len(), 2);
        for row in &report.rows {
            assert_eq!(row.status, RunStatus::Ok);
            assert!(row.final_trace_error < 1e-12);
        }
    }

    #[test]
    fn convergence_of_newton() {
        let cfg = ExperimentConfig {
            method: Method::Newton,
            ..ExperimentConfig::preset(ExperimentKind::Convergence)
        };
        let report = run_convergence(&cfg).unwrap();
        assert!((report.slope - 2.0).abs() < 0.1, "{report:?}");
    }

    #[test]
    fn nsfd_sweep_shrinks_defect() {
        let cfg = ExperimentConfig::default();
        let reports = run_nsfd_sweep(&cfg, 1.0, 3).unwrap();
        let defects: Vec<f64> = reports
            .iter()
            .map(|r| (r.phi_over_dt - 1.0).norm())
            .collect();
        assert!(defects.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn monotone_check() {
        assert!(is_monotone_non_decreasing(&[0.1, 0.1, 0.3]));
        assert!(!is_monotone_non_decreasing(&[0.2, 0.1]));
    }
}
