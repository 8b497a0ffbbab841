use std::f64::consts::PI;
use std::sync::{Arc, Mutex, MutexGuard};
use std::time::Instant;

use bloch_core::harness::config::{ExperimentConfig, ExperimentKind};
use bloch_core::harness::experiments::{
    is_monotone_non_decreasing, run_convergence, run_degenerate, run_nsfd_sweep, run_scaling,
    Setup, Variant,
};
use bloch_core::harness::presets::degenerate_polarizability;
use bloch_core::propagators::{LiouvilleStrategy, Method, RelaxationModel};
use bloch_core::splitting::{
    least_squares_slope, simulate, FieldSignal, StepPlan, StrangIntegrator,
};
use bloch_core::{ComplexMatrix, DensityMatrix, Error, LevelSystem, SpectralData};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

/// Written to the process stdout handle so the line shows without `--nocapture`.
fn report(id: usize, pass: bool, detail: String) {
    use std::io::Write;
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(
        std::io::stdout().lock(),
        "criterion {id}: {verdict} {detail}"
    );
}

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(n);
    for j in 0..n {
        for k in j + 1..n {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            p[(j, k)] = z;
            p[(k, j)] = z.conj();
        }
    }
    p
}

#[test]
fn criterion_1_oracle_equivalence() {
    let _guard = serial();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut worst_newton, mut worst_canonical, mut cases) = (0.0f64, 0.0f64, 0);
    while cases < 200 {
        let n = rng.gen_range(2..=10);
        let p = random_hermitian(&mut rng, n);
        let spec = Arc::new(SpectralData::new(&p, None).unwrap());
        if spec.min_eigenvalue_gap() <= 1e-6 {
            continue;
        }
        cases += 1;
        let gamma = rng.gen_range(-2.0..=2.0);
        let exact = LiouvilleStrategy::new(Method::Exponential, spec.clone())
            .unwrap()
            .conjugation_matrix(gamma)
            .unwrap();
        let newton = LiouvilleStrategy::new(Method::Newton, spec.clone())
            .unwrap()
            .conjugation_matrix(gamma)
            .unwrap();
        worst_newton = worst_newton.max((&newton - &exact).norm_inf() / exact.norm_inf());
        if n == 3 {
            let canonical = LiouvilleStrategy::new(Method::Canonical3, spec)
                .unwrap()
                .conjugation_matrix(gamma)
                .unwrap();
            worst_canonical = worst_canonical.max((&canonical - &exact).norm_inf());
        }
    }
    let pass = worst_newton <= 1e-11 && worst_canonical <= 1e-10;
    report(
        1,
        pass,
        format!(
            "200 cases, max relative Newton error {worst_newton:.2e}, max Canonical error {worst_canonical:.2e} ({:.2}s)",
            start.elapsed().as_secs_f64()
        ),
    );
    assert!(pass);
}

fn three_level_run(
    method: Method,
    n_p: usize,
    periods: usize,
) -> bloch_core::splitting::Trajectory {
    let cfg = ExperimentConfig::preset(ExperimentKind::ThreeLevel);
    let setup = Setup::from_config(&cfg).unwrap();
    let plan = StepPlan::periodic(n_p, periods).unwrap();
    let ctx = setup
        .integrator(Variant::of(method), &cfg, plan.dt)
        .unwrap();
    simulate(&ctx, &setup.rho0, &plan).unwrap()
}

#[test]
fn criterion_2_conservation() {
    let _guard = serial();
    let start = Instant::now();
    let mut pass = true;
    let mut details = Vec::new();
    for m in Method::ALL {
        let traj = three_level_run(m, 20, 20);
        let (tr, herm, min) = (
            traj.max_trace_error(),
            traj.max_hermiticity_defect(),
            traj.min_eigenvalue(),
        );
        pass &= tr <= 1e-11 && herm <= 1e-11;
        if m.is_exact() {
            pass &= min >= -1e-10;
        }
        details.push(format!(
            "{} trace {tr:.1e} herm {herm:.1e} min_eig {min:.1e}",
            m.key()
        ));
    }
    let elapsed = start.elapsed().as_secs_f64();
    pass &= elapsed < 5.0;
    report(2, pass, format!("{}; {elapsed:.2}s", details.join(", ")));
    assert!(pass);
}

#[test]
fn criterion_3_crank_nicolson_positivity() {
    let _guard = serial();
    let start = Instant::now();
    let coarse = three_level_run(Method::CrankNicolson, 5, 2).min_eigenvalue();
    let fine = three_level_run(Method::CrankNicolson, 100, 20).min_eigenvalue();
    let elapsed = start.elapsed().as_secs_f64();
    let pass = coarse < -1e-6 && fine >= -1e-6 && elapsed < 5.0;
    report(
        3,
        pass,
        format!("min eigenvalue n_p=5 (2 periods) {coarse:.3e}, n_p=100 (20 periods) {fine:.3e}; {elapsed:.2}s"),
    );
    assert!(pass);
}

#[test]
fn criterion_4_degenerate_case() {
    let _guard = serial();
    let start = Instant::now();
    let cfg = ExperimentConfig::preset(ExperimentKind::Degenerate);
    let rep = run_degenerate(&cfg).unwrap();
    let newton = rep
        .rows
        .iter()
        .find(|r| r.method == Method::Newton.label())
        .unwrap();
    let deviation = newton.max_deviation.unwrap_or(f64::INFINITY);

    let spec = Arc::new(SpectralData::new(&degenerate_polarizability(), None).unwrap());
    let canonical = LiouvilleStrategy::new(Method::Canonical3, spec)
        .unwrap()
        .conjugation_matrix(0.05);
    let degenerate = matches!(canonical, Err(Error::DegenerateSpectrum { .. }));
    let canonical_row = rep
        .rows
        .iter()
        .find(|r| r.method == Method::Canonical3.label())
        .unwrap();
    let row_mentions = canonical_row
        .message
        .as_deref()
        .unwrap_or("")
        .contains("degenerate");

    let elapsed = start.elapsed().as_secs_f64();
    let pass = deviation <= 1e-9 && degenerate && row_mentions && elapsed < 5.0;
    report(
        4,
        pass,
        format!(
            "Newton deviation {deviation:.2e}, Canonical: {}; {elapsed:.2}s",
            canonical_row.message.as_deref().unwrap_or("no error")
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_5_convergence_order() {
    let _guard = serial();
    let start = Instant::now();
    let cfg = ExperimentConfig {
        method: Method::Exponential,
        n_p: 20,
        ..ExperimentConfig::preset(ExperimentKind::Convergence)
    };
    let rep = run_convergence(&cfg).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let ladder_ok = rep.dts == [1.0 / 20.0, 1.0 / 40.0, 1.0 / 80.0, 1.0 / 160.0]
        && (rep.reference_dt - 1.0 / 1280.0).abs() < 1e-15;
    let pass = ladder_ok && (rep.slope - 2.0).abs() <= 0.1 && elapsed < 30.0;
    report(
        5,
        pass,
        format!(
            "slope {:.4}, errors {}; {elapsed:.2}s",
            rep.slope,
            rep.errors
                .iter()
                .map(|e| format!("{e:.2e}"))
                .collect::<Vec<_>>()
                .join(" ")
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_6_nsfd_properties() {
    let _guard = serial();
    let start = Instant::now();
    let cfg = ExperimentConfig::preset(ExperimentKind::ThreeLevel);
    let sweep = run_nsfd_sweep(
        &ExperimentConfig {
            n_p: 10,
            ..cfg.clone()
        },
        1.0,
        6,
    )
    .unwrap();
    let defects: Vec<f64> = sweep.iter().map(|r| (r.phi_over_dt - 1.0).norm()).collect();
    let shrinking = defects.windows(2).all(|w| w[1] < w[0]);
    let xs: Vec<f64> = sweep.iter().map(|r| r.dt.ln()).collect();
    let ys: Vec<f64> = defects.iter().map(|d| d.ln()).collect();
    let order = least_squares_slope(&xs, &ys);

    let system = cfg.system().unwrap();
    let spec = bloch_core::spectral_precompute(&system, None).unwrap();
    let limit = bloch_core::propagators::nsfd_report(1e-4, 1.0, &spec).unwrap();
    let three = limit.three_level.unwrap();
    let alpha_err = (three.alpha - 1.0).norm();
    let xi_err = (three.xi - 0.5).norm();

    let elapsed = start.elapsed().as_secs_f64();
    let pass =
        shrinking && order >= 1.0 - 0.1 && alpha_err <= 1e-6 && xi_err <= 1e-6 && elapsed < 1.0;
    report(
        6,
        pass,
        format!(
            "|phi/dt - 1| {:.2e} -> {:.2e}, observed order {order:.3}; |alpha - 1| {alpha_err:.1e}, |xi - 1/2| {xi_err:.1e}; {elapsed:.3}s",
            defects[0],
            defects[defects.len() - 1]
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_7_timing_trend() {
    let _guard = serial();
    let start = Instant::now();
    let cfg = ExperimentConfig {
        levels: vec![2, 3, 4, 5, 10],
        ..ExperimentConfig::preset(ExperimentKind::Scaling)
    };
    let rep = run_scaling(&cfg).unwrap();
    let horner: Vec<f64> = rep.ratios.iter().map(|r| r.horner_over_series).collect();
    let cached: Vec<f64> = rep.ratios.iter().map(|r| r.cached_over_series).collect();
    let faster_small = rep
        .ratios
        .iter()
        .filter(|r| r.levels <= 4)
        .all(|r| r.horner_over_series < 1.0);
    let monotone = is_monotone_non_decreasing(&horner);
    let elapsed = start.elapsed().as_secs_f64();
    let pass = faster_small && monotone && elapsed < 60.0;
    report(
        7,
        pass,
        format!(
            "Newton (Horner) / Exponential (series) over N = 2,3,4,5,10: {horner:.3?}; cached basis: {cached:.3?}; {elapsed:.1}s"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_8_zero_field_exactness() {
    let _guard = serial();
    let start = Instant::now();
    let omega = vec![0.0, PI, 2.0 * PI];
    let p = ComplexMatrix::from_real_rows(&[
        vec![0.0, 1.0, 1.1],
        vec![1.0, 0.0, 1.0],
        vec![1.1, 1.0, 0.0],
    ])
    .unwrap();
    let sys = LevelSystem::new(omega.clone(), p, RelaxationModel::None).unwrap();
    let psi = [
        Complex64::new(0.6, 0.0),
        Complex64::new(0.3, 0.5),
        Complex64::new(-0.2, 0.1),
    ];
    let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut m = ComplexMatrix::zeros(3);
    for j in 0..3 {
        for k in 0..3 {
            m[(j, k)] = psi[j] * psi[k].conj() / (norm * norm);
        }
    }
    let rho0 = DensityMatrix::new(m.clone()).unwrap();
    let plan = StepPlan::periodic(20, 20).unwrap();
    let mut worst = 0.0f64;
    for method in Method::ALL {
        let spec = Arc::new(SpectralData::new(sys.polarizability(), None).unwrap());
        let strategy = LiouvilleStrategy::new(method, spec).unwrap();
        let ctx = StrangIntegrator::new(&sys, strategy, FieldSignal::zero(), plan.dt).unwrap();
        let traj = simulate(&ctx, &rho0, &plan).unwrap();
        for (i, &t) in traj.times.iter().enumerate() {
            let state = traj.state(i);
            for j in 0..3 {
                for k in 0..3 {
                    let expected =
                        m[(j, k)] * Complex64::from_polar(1.0, -(omega[j] - omega[k]) * t);
                    worst = worst.max((state[(j, k)] - expected).norm());
                }
            }
        }
    }
    let pass = worst <= 1e-12;
    report(
        8,
        pass,
        format!("max |rho_jk(t) - rho_jk(0) e^(-i w_jk t)| {worst:.2e} over 20 periods, all methods; {:.2}s", start.elapsed().as_secs_f64()),
    );
    assert!(pass);
}
