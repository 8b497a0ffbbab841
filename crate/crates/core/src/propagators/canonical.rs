//! Power-basis coefficients for 3×3 exponentials.
//!
//! With three distinct nodes `λ₁, λ₂, λ₃` the coefficients of
//! `e^{iγx} ≈ α₀ + α₁x + α₂x²` are the Cramer ratios of the Vandermonde
//! system `α₀ + α₁λ_k + α₂λ_k² = e^{iγλ_k}`:
//!
//! ```text
//! δ    = (λ₂ − λ₁)(λ₃ − λ₁)(λ₃ − λ₂)
//! δ α₀ = Σ_cyc e^{iγλ₁} λ₂ λ₃ (λ₃ − λ₂)
//! δ α₁ = Σ_cyc e^{iγλ₁} (λ₂² − λ₃²)
//! δ α₂ = Σ_cyc e^{iγλ₁} (λ₃ − λ₂)
//! ```
//!
//! The formulas divide by products of node gaps, so they blow up as two
//! eigenvalues merge. Below the degeneracy threshold they are refused.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative minimum node gap accepted by [`canonical3_coefficients`].
pub const CANONICAL_GAP_TOLERANCE: f64 = 1e-6;

/// Relative residual allowed on the three interpolation conditions.
const RESIDUAL_TOLERANCE: f64 = 1e-12;

/// Threshold `1e−6 · max(1, spectral radius)` for the given nodes.
pub fn canonical_gap_threshold(nodes: &[f64; 3]) -> f64 {
    CANONICAL_GAP_TOLERANCE * nodes.iter().fold(1.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn min_node_gap(nodes: &[f64; 3]) -> f64 {
    let [a, b, c] = *nodes;
    (a - b).abs().min((b - c).abs()).min((a - c).abs())
}

/// Returns `[α₀, α₁, α₂]`.
pub fn canonical3_coefficients(gamma: f64, nodes: [f64; 3]) -> Result<[Complex64; 3]> {
    let threshold = canonical_gap_threshold(&nodes);
    let min_gap = min_node_gap(&nodes);
    if !(min_gap >= threshold) {
        return Err(Error::DegenerateSpectrum { min_gap, threshold });
    }
    let [l1, l2, l3] = nodes;
    let [e1, e2, e3] = nodes.map(|l| Complex64::from_polar(1.0, gamma * l));
    let delta = (l2 - l1) * (l3 - l1) * (l3 - l2);

    let alpha0 =
        (e1 * (l2 * l3 * (l3 - l2)) + e2 * (l3 * l1 * (l1 - l3)) + e3 * (l1 * l2 * (l2 - l1)))
            / delta;
    let alpha1 =
        (e1 * (l2 * l2 - l3 * l3) + e2 * (l3 * l3 - l1 * l1) + e3 * (l1 * l1 - l2 * l2)) / delta;
    let alpha2 = (e1 * (l3 - l2) + e2 * (l1 - l3) + e3 * (l2 - l1)) / delta;
    let coeffs = [alpha0, alpha1, alpha2];

    // The interpolation conditions are the definition; check them.
    for (&l, e) in nodes.iter().zip([e1, e2, e3]) {
        let terms = [alpha0, alpha1 * l, alpha2 * l * l];
        let magnitude = terms.iter().map(|t| t.norm()).sum::<f64>().max(1.0);
        let residual = (terms.iter().sum::<Complex64>() - e).norm();
        if residual > RESIDUAL_TOLERANCE * magnitude {
            return Err(Error::DegenerateSpectrum { min_gap, threshold });
        }
    }
    Ok(coeffs)
}
