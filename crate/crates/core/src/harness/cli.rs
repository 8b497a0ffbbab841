use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use super::config::{ExperimentConfig, ExperimentKind, FULL_PERIODS, TIMING_PERIODS};
use super::csv::{emit_csv, emit_rows};
use super::experiments::{
    is_monotone_non_decreasing, run_convergence, run_crank_nicolson_table, run_degenerate,
    run_nsfd_sweep, run_scaling, run_three_level, BenchmarkRow, RunStatus, CONVERGENCE_LEVELS,
};
use super::plot::write_plot_script;
use crate::error::Error;
use crate::propagators::Method;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

/// Steps per period of the first NSFD sweep entry unless `--np` is given.
const NSFD_DEFAULT_NP: usize = 10;

#[derive(Debug, Parser)]
#[command(
    name = "bloch",
    version,
    about = "Strang splitting for the N-level Bloch equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Driven three-level run (or the system in --config); writes a trajectory CSV
    Simulate(CommonArgs),
    /// Exponential, Newton and Canonical on the degenerate polarizability
    Degenerate(CommonArgs),
    /// Wall time of Newton against the series exponential for several level counts
    Scaling(CommonArgs),
    /// Wall time and positivity of the four methods for n_p in 5, 10, 20, 100
    Table1(CommonArgs),
    /// Observed order of the splitting on a halving step ladder
    Convergence(CommonArgs),
    /// Renormalised step and NSFD coefficients on a halving step ladder at E = 1
    NsfdReport(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Liouville strategy: exp, cn, newton or canonical
    #[arg(long, value_parser = parse_method)]
    method: Option<Method>,
    /// Steps per field period
    #[arg(long = "np")]
    n_p: Option<usize>,
    #[arg(long)]
    periods: Option<usize>,
    /// Level counts, comma separated
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<usize>>,
    /// TOML experiment configuration
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record every STRIDE-th step
    #[arg(long)]
    stride: Option<usize>,
    /// Seed of the random polarizabilities
    #[arg(long)]
    seed: Option<u64>,
    /// Also write a matplotlib script next to the trajectory CSV (simulate)
    #[arg(long)]
    plot: bool,
    /// Full-length timing runs (2000 periods)
    #[arg(long)]
    full: bool,
    /// Run independent trajectories concurrently (degenerate, convergence)
    #[arg(long)]
    parallel: bool,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse::<Method>().map_err(|e| e.to_string())
}

/// Failure of a subcommand, mapped to an exit code.
enum Failure {
    Usage(String),
    Numerical(String),
}

impl Failure {
    fn from_error(context: &str, e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(format!("{context}: {e}"))
        } else {
            Failure::Usage(format!("{context}: {e}"))
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Runs the command line and returns the process exit code.
pub fn cli_main<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let outcome = match &cli.command {
        Command::Simulate(a) => simulate(a, stdout),
        Command::Degenerate(a) => degenerate(a, stdout),
        Command::Scaling(a) => scaling(a, stdout),
        Command::Table1(a) => table1(a, stdout),
        Command::Convergence(a) => convergence(a, stdout),
        Command::NsfdReport(a) => nsfd(a, stdout),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Numerical(msg)) => {
            let _ = writeln!(stderr, "numerical failure: {msg}");
            EXIT_NUMERICAL
        }
    }
}

fn build_config(
    kind: ExperimentKind,
    a: &CommonArgs,
) -> std::result::Result<ExperimentConfig, Failure> {
    let mut cfg = match &a.config {
        Some(path) => ExperimentConfig::load(path).map_err(|e| Failure::Usage(e.to_string()))?,
        None => ExperimentConfig::preset(kind),
    };
    if a.full {
        cfg.periods = FULL_PERIODS;
    }
    if let Some(m) = a.method {
        cfg.method = m;
    }
    if let Some(n) = a.n_p {
        cfg.n_p = n;
    }
    if let Some(p) = a.periods {
        cfg.periods = p;
    }
    if let Some(levels) = &a.levels {
        cfg.levels = levels.clone();
    }
    if let Some(out) = &a.out {
        cfg.output_path = Some(out.clone());
    }
    if let Some(s) = a.stride {
        cfg.record_stride = s;
    }
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    cfg.parallel |= a.parallel;
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(cfg)
}

fn write_rows<T: Serialize>(cfg: &ExperimentConfig, rows: &[T]) -> Outcome {
    if let Some(path) = &cfg.output_path {
        emit_rows(rows, path).map_err(|e| Failure::Usage(e.to_string()))?;
    }
    Ok(())
}

fn simulate(a: &CommonArgs, out: &mut dyn Write) -> Outcome {
    let cfg = build_config(ExperimentKind::ThreeLevel, a)?;
    if a.plot && cfg.output_path.is_none() {
        return Err(Failure::Usage(
            "--plot needs --out for the trajectory CSV".into(),
        ));
    }
    let (traj, row) =
        run_three_level(&cfg).map_err(|e| Failure::from_error(cfg.method.label(), e))?;
    let _ = writeln!(
        out,
        "method={} n_p={} periods={} steps={} wall_time={:.6}s min_eigenvalue={:.3e} max_trace_error={:.3e} status={}",
        row.method,
        cfg.n_p,
        cfg.periods,
        row.steps,
        row.wall_time,
        row.min_eigenvalue_overall,
        traj.max_trace_error(),
        row.status
    );
    if let Some(path) = &cfg.output_path {
        emit_csv(&traj, path).map_err(|e| Failure::Usage(e.to_string()))?;
        let _ = writeln!(out, "wrote {}", path.display());
        if a.plot {
            let title = format!("{}, n_p = {}", row.method, cfg.n_p);
            let script =
                write_plot_script(path, &title).map_err(|e| Failure::Usage(e.to_string()))?;
            let _ = writeln!(out, "wrote {}", script.display());
        }
    }
    Ok(())
}

fn degenerate(a: &CommonArgs, out: &mut dyn Write) -> Outcome {
    let cfg = build_config(ExperimentKind::Degenerate, a)?;
    let report = run_degenerate(&cfg).map_err(|e| Failure::from_error("Exponential", e))?;
    let _ = writeln!(
        out,
        "{:<16} {:<20} {:>14} {:>14}  note",
        "method", "status", "max_deviation", "min_eigenvalue"
    );
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{:<16} {:<20} {:>14} {:>14}  {}",
            r.method,
            r.status.to_string(),
            r.max_deviation.map_or("-".into(), |d| format!("{d:.3e}")),
            fmt_sci(r.min_eigenvalue_overall),
            r.message.as_deref().unwrap_or("")
        );
    }
    write_rows(&cfg, &report.rows)
}

fn fmt_sci(x: f64) -> String {
    if x.is_nan() {
        "-".into()
    } else {
        format!("{x:.3e}")
    }
}

fn scaling(a: &CommonArgs, out: &mut dyn Write) -> Outcome {
    let mut cfg = build_config(ExperimentKind::Scaling, a)?;
    cfg.p_matrix =
        super::config::PolarizabilitySpec::Preset(super::config::PolarizabilityPreset::Random);
    let report = run_scaling(&cfg).map_err(|e| Failure::from_error("scaling", e))?;
    let _ = writeln!(
        out,
        "{} periods at n_p = {}, seed {}",
        cfg.periods, cfg.n_p, cfg.seed
    );
    let _ = writeln!(
        out,
        "{:>3}  {:<22} {:>12} {:>14} {:>12}",
        "N", "method", "wall (s)", "per step (us)", "offline (s)"
    );
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{:>3}  {:<22} {:>12.6} {:>14.3} {:>12.2e}",
            r.size,
            r.method,
            r.wall_time,
            r.time_per_step() * 1e6,
            r.offline_time
        );
    }
    let _ = writeln!(
        out,
        "\n{:>3}  {:>20} {:>20}",
        "N", "Horner / series", "cached / series"
    );
    for r in &report.ratios {
        let _ = writeln!(
            out,
            "{:>3}  {:>20.3} {:>20.3}",
            r.levels, r.horner_over_series, r.cached_over_series
        );
    }
    let horner: Vec<f64> = report.ratios.iter().map(|r| r.horner_over_series).collect();
    let _ = writeln!(
        out,
        "Horner / series ratio non-decreasing in N: {}",
        if is_monotone_non_decreasing(&horner) {
            "yes"
        } else {
            "no"
        }
    );
    write_rows(&cfg, &report.rows)
}

fn table1(a: &CommonArgs, out: &mut dyn Write) -> Outcome {
    let mut cfg = build_config(ExperimentKind::ThreeLevel, a)?;
    if a.config.is_none() && a.periods.is_none() && !a.full {
        cfg.periods = TIMING_PERIODS;
    }
    let rows = run_crank_nicolson_table(&cfg).map_err(|e| Failure::from_error("table1", e))?;
    let _ = writeln!(
        out,
        "Computational time in seconds, {} periods (three-level test case)",
        cfg.periods
    );
    print_table(out, &cfg, &rows, |r| {
        let note = match r.status {
            RunStatus::Ok => "",
            RunStatus::PositivityViolated => " (out)",
            RunStatus::Error => " (error)",
        };
        format!("{:.4}{note}", r.wall_time)
    });
    let _ = writeln!(out, "\nMax deviation from Exponential");
    print_table(out, &cfg, &rows, |r| {
        r.max_deviation.map_or("-".into(), |d| format!("{d:.2e}"))
    });
    let _ = writeln!(out, "\nSmallest eigenvalue (positivity threshold -1e-6)");
    print_table(out, &cfg, &rows, |r| fmt_sci(r.min_eigenvalue_overall));
    write_rows(&cfg, &rows)
}

fn print_table(
    out: &mut dyn Write,
    cfg: &ExperimentConfig,
    rows: &[BenchmarkRow],
    cell: impl Fn(&BenchmarkRow) -> String,
) {
    let _ = write!(out, "{:>5}", "n_p");
    for m in Method::ALL {
        let _ = write!(out, " | {:<18}", m.label());
    }
    let _ = writeln!(out);
    for &n_p in &cfg.table_np {
        let _ = write!(out, "{n_p:>5}");
        for m in Method::ALL {
            let text = rows
                .iter()
                .find(|r| r.size == n_p && r.method == m.label())
                .map_or("-".into(), &cell);
            let _ = write!(out, " | {text:<18}");
        }
        let _ = writeln!(out);
    }
}

#[derive(Serialize)]
struct ConvergenceRow {
    dt: f64,
    error: f64,
}

fn convergence(a: &CommonArgs, out: &mut dyn Write) -> Outcome {
    let cfg = build_config(ExperimentKind::Convergence, a)?;
    let report = run_convergence(&cfg).map_err(|e| Failure::from_error(cfg.method.label(), e))?;
    let _ = writeln!(
        out,
        "{} over {} period(s), reference Exponential at dt = {:.6e}",
        cfg.method.label(),
        cfg.periods,
        report.reference_dt
    );
    let _ = writeln!(out, "{:>14} {:>14}", "dt", "error");
    let rows: Vec<ConvergenceRow> = report
        .dts
        .iter()
        .zip(&report.errors)
        .map(|(&dt, &error)| ConvergenceRow { dt, error })
        .collect();
    for r in &rows {
        let _ = writeln!(out, "{:>14.6e} {:>14.6e}", r.dt, r.error);
    }
    let _ = writeln!(out, "observed order: {:.4}", report.slope);
    write_rows(&cfg, &rows)
}

#[derive(Serialize)]
struct NsfdRow {
    dt: f64,
    gamma: f64,
    phi_over_dt_re: f64,
    phi_over_dt_im: f64,
    defect: f64,
    alpha_re: Option<f64>,
    alpha_im: Option<f64>,
    beta_over_dt_re: Option<f64>,
    beta_over_dt_im: Option<f64>,
    xi_re: Option<f64>,
    xi_im: Option<f64>,
}

fn nsfd(a: &CommonArgs, out: &mut dyn Write) -> Outcome {
    let mut cfg = build_config(ExperimentKind::ThreeLevel, a)?;
    if a.n_p.is_none() {
        cfg.n_p = NSFD_DEFAULT_NP;
    }
    let reports = run_nsfd_sweep(&cfg, 1.0, CONVERGENCE_LEVELS)
        .map_err(|e| Failure::from_error("nsfd-report", e))?;
    let rows: Vec<NsfdRow> = reports
        .iter()
        .map(|r| {
            let t = r.three_level;
            NsfdRow {
                dt: r.dt,
                gamma: r.gamma,
                phi_over_dt_re: r.phi_over_dt.re,
                phi_over_dt_im: r.phi_over_dt.im,
                defect: (r.phi_over_dt - 1.0).norm(),
                alpha_re: t.map(|t| t.alpha.re),
                alpha_im: t.map(|t| t.alpha.im),
                beta_over_dt_re: t.map(|t| t.beta.re / r.dt),
                beta_over_dt_im: t.map(|t| t.beta.im / r.dt),
                xi_re: t.map(|t| t.xi.re),
                xi_im: t.map(|t| t.xi.im),
            }
        })
        .collect();
    let _ = writeln!(out, "E = 1");
    let _ = writeln!(
        out,
        "{:>10} {:>24} {:>11} {:>24} {:>24} {:>24}",
        "dt", "phi/dt", "|phi/dt-1|", "alpha", "beta/dt", "xi"
    );
    let pair = |re: Option<f64>, im: Option<f64>| match (re, im) {
        (Some(re), Some(im)) => format!("{re:.8}{im:+.2e}i"),
        _ => "-".into(),
    };
    for r in &rows {
        let _ = writeln!(
            out,
            "{:>10.6} {:>24} {:>11.3e} {:>24} {:>24} {:>24}",
            r.dt,
            pair(Some(r.phi_over_dt_re), Some(r.phi_over_dt_im)),
            r.defect,
            pair(r.alpha_re, r.alpha_im),
            pair(r.beta_over_dt_re, r.beta_over_dt_im),
            pair(r.xi_re, r.xi_im)
        );
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.dt.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.defect.ln()).collect();
    if rows.iter().all(|r| r.defect > 0.0) {
        let slope = crate::splitting::least_squares_slope(&xs, &ys);
        let _ = writeln!(out, "observed order of |phi/dt - 1|: {slope:.3}");
    }
    write_rows(&cfg, &rows)
}
