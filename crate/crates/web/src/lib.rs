//! Browser bindings for the three-level demo. The plain functions return
//! flat `f64` rows so they map onto `Float64Array` without copying twice.

use std::sync::Arc;

use bloch_core::presets::{ladder_frequencies, three_level_polarizability};
use bloch_core::propagators::{nsfd_report, LiouvilleStrategy, Method, RelaxationModel};
use bloch_core::splitting::{simulate, FieldSignal, StepPlan, StrangIntegrator, Trajectory};
use bloch_core::{DensityMatrix, LevelSystem, SpectralData};
use wasm_bindgen::prelude::*;

/// Values per row returned by [`population_rows`].
pub const POPULATION_ROW: usize = 5;

fn three_level() -> Result<(LevelSystem, Arc<SpectralData>), String> {
    let sys = LevelSystem::new(
        ladder_frequencies(3),
        three_level_polarizability(),
        RelaxationModel::None,
    )
    .map_err(|e| e.to_string())?;
    let spec = SpectralData::new(sys.polarizability(), None).map_err(|e| e.to_string())?;
    Ok((sys, Arc::new(spec)))
}

fn run(method: Method, n_p: usize, periods: usize) -> Result<Trajectory, String> {
    let (sys, spec) = three_level()?;
    let plan = StepPlan::periodic(n_p, periods).map_err(|e| e.to_string())?;
    let strategy = LiouvilleStrategy::new(method, spec).map_err(|e| e.to_string())?;
    let ctx = StrangIntegrator::new(&sys, strategy, FieldSignal::unit_sine(), plan.dt)
        .map_err(|e| e.to_string())?;
    let rho0 = DensityMatrix::pure_level(3, 0).map_err(|e| e.to_string())?;
    simulate(&ctx, &rho0, &plan).map_err(|e| format!("{}: {e}", method.label()))
}

fn parse_method(method: &str) -> Result<Method, String> {
    method.parse().map_err(|e: bloch_core::Error| e.to_string())
}

/// Rows `t, ρ₁₁, ρ₂₂, ρ₃₃, λ_min` of the driven three-level run.
pub fn population_rows(method: &str, n_p: usize, periods: usize) -> Result<Vec<f64>, String> {
    let traj = run(parse_method(method)?, n_p, periods)?;
    let mut out = Vec::with_capacity(traj.len() * POPULATION_ROW);
    for k in 0..traj.len() {
        out.push(traj.times[k]);
        out.extend_from_slice(&traj.populations[k]);
        out.push(traj.diagnostics[k].min_eigenvalue);
    }
    Ok(out)
}

/// Rows `t, max_jk |ρ_jk − ρ^exp_jk|` against the Exponential run.
pub fn deviation_rows(method: &str, n_p: usize, periods: usize) -> Result<Vec<f64>, String> {
    let traj = run(parse_method(method)?, n_p, periods)?;
    let reference = run(Method::Exponential, n_p, periods)?;
    let mut out = Vec::with_capacity(2 * traj.len());
    for k in 0..traj.len() {
        out.push(traj.times[k]);
        out.push((&traj.state(k) - &reference.state(k)).max_abs());
    }
    Ok(out)
}

/// Rows `Δt, |Φ(Δt)/Δt − 1|` for `Δt = 1/n_p, 1/(2n_p), …` at field `e_field`.
pub fn nsfd_rows(e_field: f64, n_p: usize, levels: usize) -> Result<Vec<f64>, String> {
    let (_, spec) = three_level()?;
    let mut out = Vec::with_capacity(2 * levels);
    for k in 0..levels {
        let dt = 1.0 / (n_p << k) as f64;
        let r = nsfd_report(dt, e_field, &spec).map_err(|e| e.to_string())?;
        out.push(dt);
        out.push((r.phi_over_dt - 1.0).norm());
    }
    Ok(out)
}

fn js<T>(r: Result<T, String>) -> Result<T, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn populations(method: &str, n_p: usize, periods: usize) -> Result<Vec<f64>, JsValue> {
    js(population_rows(method, n_p, periods))
}

#[wasm_bindgen]
pub fn deviation(method: &str, n_p: usize, periods: usize) -> Result<Vec<f64>, JsValue> {
    js(deviation_rows(method, n_p, periods))
}

#[wasm_bindgen]
pub fn nsfd_defect(e_field: f64, n_p: usize, levels: usize) -> Result<Vec<f64>, JsValue> {
    js(nsfd_rows(e_field, n_p, levels))
}
