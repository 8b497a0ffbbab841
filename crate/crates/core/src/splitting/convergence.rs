use crate::density::DensityMatrix;
use crate::error::{Error, Result};

use super::strang::{StepPlan, StrangIntegrator};
use super::trajectory::propagate;

/// Errors at or below this level are roundoff, not truncation.
pub const NOISE_FLOOR: f64 = 1e-13;

/// Refinement factor between the finest step and the reference step.
pub const REFERENCE_REFINEMENT: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub dts: Vec<f64>,
    /// Max-abs distance of each final state from the reference.
    pub errors: Vec<f64>,
    pub reference_dt: f64,
    /// Least-squares slope of `log error` against `log dt`.
    pub slope: f64,
}

/// Order estimate against a reference run of the same integrator family at
/// `dt_min / 8`.
pub fn convergence_order<F>(
    factory: F,
    rho0: &DensityMatrix,
    t_end: f64,
    dt_list: &[f64],
) -> Result<ConvergenceReport>
where
    F: Fn(f64) -> Result<StrangIntegrator> + Sync,
{
    convergence_order_with_reference(&factory, &factory, rho0, t_end, dt_list, false)
}

/// As [`convergence_order`], with the reference run built by `reference`.
/// With `parallel`, the ladder runs on scoped threads; results are identical.
pub fn convergence_order_with_reference<F, G>(
    factory: F,
    reference: G,
    rho0: &DensityMatrix,
    t_end: f64,
    dt_list: &[f64],
    parallel: bool,
) -> Result<ConvergenceReport>
where
    F: Fn(f64) -> Result<StrangIntegrator> + Sync,
    G: Fn(f64) -> Result<StrangIntegrator>,
{
    check_ladder(dt_list)?;
    let final_state = |ctx: StrangIntegrator, dt: f64| -> Result<DensityMatrix> {
        propagate(&ctx, rho0, &StepPlan::covering(t_end, dt)?)
    };
    let run = |dt: f64| final_state(factory(dt)?, dt);
    let reference_dt = dt_list[dt_list.len() - 1] / REFERENCE_REFINEMENT as f64;

    let (exact, states) = if parallel {
        std::thread::scope(|s| {
            let handles: Vec<_> = dt_list.iter().map(|&dt| s.spawn(move || run(dt))).collect();
            let exact = final_state(reference(reference_dt)?, reference_dt);
            let states: Vec<_> = handles
                .into_iter()
                .map(|h| h.join().expect("convergence worker panicked"))
                .collect();
            Ok::<_, crate::error::Error>((exact, states))
        })?
    } else {
        let exact = final_state(reference(reference_dt)?, reference_dt);
        (exact, dt_list.iter().map(|&dt| run(dt)).collect())
    };
    let exact = exact?;
    let mut errors = Vec::with_capacity(dt_list.len());
    for state in states {
        errors.push((state?.matrix() - exact.matrix()).max_abs());
    }

    let max_error = errors.iter().copied().fold(0.0, f64::max);
    if errors.iter().any(|&e| !(e > NOISE_FLOOR)) {
        return Err(Error::InsufficientResolution { max_error });
    }
    let xs: Vec<f64> = dt_list.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    Ok(ConvergenceReport {
        dts: dt_list.to_vec(),
        errors,
        reference_dt,
        slope: least_squares_slope(&xs, &ys),
    })
}

fn check_ladder(dt_list: &[f64]) -> Result<()> {
    if dt_list.len() < 3 {
        return Err(Error::InvalidPlan(format!(
            "need at least 3 step sizes, got {}",
            dt_list.len()
        )));
    }
    for w in dt_list.windows(2) {
        let ratio = w[0] / w[1];
        if !(w[1] > 0.0) || (ratio - 2.0).abs() > 1e-9 {
            return Err(Error::InvalidPlan(format!(
                "step sizes must halve at each level ({} then {})",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
