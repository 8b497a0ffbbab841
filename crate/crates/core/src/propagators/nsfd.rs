//! Nonstandard finite-difference reading of the exact Liouville step.
//!
//! Writing `exp(iΔtE p) = Σ_j α_j p^j` and `α₁ = iE α̃₁`, the exact scheme
//! becomes `Φ⁻¹(ρ⁺ − ρ) = −i(Ṽρ⁺ − ρṼ)` with the renormalised step
//! `Φ = α̃₁/α₀` and `Ṽ = E 𝒬(p)`, `𝒬(p) = p + (α₂/α₁) p² + …`.

use num_complex::Complex64;

use super::canonical::canonical3_coefficients;
use super::newton::{newton_divided_differences, newton_to_power_basis};
use crate::error::{Error, Result};
use crate::spectral::SpectralData;

/// Coefficients below this magnitude count as vanishing.
pub const VANISHING_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct NsfdReport {
    pub dt: f64,
    pub e_field: f64,
    /// `γ = Δt·E`
    pub gamma: f64,
    /// Power-basis coefficients `α_j(γ)`, padded with zeros to length N.
    pub alpha: Vec<Complex64>,
    pub alpha0: Complex64,
    pub alpha1_tilde: Complex64,
    /// `Φ/Δt = α̃₁ / (α₀ Δt)`; real only when the spectrum is symmetric.
    pub phi_over_dt: Complex64,
    /// Power-basis coefficients of `𝒬(p)`, lowest degree first (`q[1] = 1`).
    pub q_poly_coeffs: Vec<Complex64>,
    /// Three-level scheme parameters, when `p` is 3×3 with a simple spectrum.
    pub three_level: Option<ThreeLevelNsfd>,
}

/// `α = α₀`, `β = −iα₁`, `ξ = α₂/α₁²` with coefficients taken in powers of
/// `V = E p`, computed from the closed-form 3×3 coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeLevelNsfd {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub xi: Complex64,
}

pub fn nsfd_report(dt: f64, e_field: f64, spec: &SpectralData) -> Result<NsfdReport> {
    if !(dt > 0.0 && dt.is_finite() && e_field.is_finite()) {
        return Err(Error::InvalidPlan(format!(
            "NSFD report needs dt > 0 and a finite field (dt = {dt}, E = {e_field})"
        )));
    }
    let n = spec.dim();
    let gamma = dt * e_field;

    if e_field == 0.0 {
        return Ok(zero_field_limit(dt, n, spec));
    }

    let nodes = spec.distinct_nodes();
    let newton = newton_divided_differences(gamma, nodes)?;
    let mut alpha = newton_to_power_basis(&newton, nodes);
    alpha.resize(n, Complex64::new(0.0, 0.0));

    let alpha0 = alpha[0];
    let alpha1 = alpha[1];
    if alpha0.norm() < VANISHING_TOLERANCE {
        return Err(Error::VanishingCoefficient {
            which: "alpha0",
            magnitude: alpha0.norm(),
        });
    }
    let alpha1_tilde = alpha1 / Complex64::new(0.0, e_field);
    if alpha1_tilde.norm() < VANISHING_TOLERANCE * dt {
        return Err(Error::VanishingCoefficient {
            which: "alpha1_tilde",
            magnitude: alpha1_tilde.norm(),
        });
    }
    let phi_over_dt = alpha1_tilde / (alpha0 * dt);

    let mut q_poly_coeffs = vec![Complex64::new(0.0, 0.0); n];
    for j in 1..n {
        q_poly_coeffs[j] = alpha[j] / alpha1;
    }

    let three_level = three_level_parameters(gamma, e_field, spec)?;

    Ok(NsfdReport {
        dt,
        e_field,
        gamma,
        alpha,
        alpha0,
        alpha1_tilde,
        phi_over_dt,
        q_poly_coeffs,
        three_level,
    })
}

fn three_level_parameters(
    gamma: f64,
    e_field: f64,
    spec: &SpectralData,
) -> Result<Option<ThreeLevelNsfd>> {
    if spec.dim() != 3 || spec.distinct_nodes().len() != 3 {
        return Ok(None);
    }
    let ev = spec.eigenvalues();
    let [a0, a1, a2] = match canonical3_coefficients(gamma, [ev[0], ev[1], ev[2]]) {
        Ok(c) => c,
        Err(Error::DegenerateSpectrum { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    // Powers of V = E p rescale the p-basis coefficients by E^{-j}.
    let a1_v = a1 / e_field;
    let a2_v = a2 / (e_field * e_field);
    if a1_v.norm() < VANISHING_TOLERANCE * gamma.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::VanishingCoefficient {
            which: "alpha1",
            magnitude: a1_v.norm(),
        });
    }
    Ok(Some(ThreeLevelNsfd {
        alpha: a0,
        beta: Complex64::new(0.0, -1.0) * a1_v,
        xi: a2_v / (a1_v * a1_v),
    }))
}

/// Zero field: the exact step is the identity and every ratio takes its limit.
fn zero_field_limit(dt: f64, n: usize, spec: &SpectralData) -> NsfdReport {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let mut alpha = vec![zero; n];
    alpha[0] = one;
    let mut q_poly_coeffs = vec![zero; n];
    q_poly_coeffs[1] = one;
    let three_level = (n == 3 && spec.distinct_nodes().len() == 3).then_some(ThreeLevelNsfd {
        alpha: one,
        beta: Complex64::new(dt, 0.0),
        xi: Complex64::new(0.5, 0.0),
    });
    NsfdReport {
        dt,
        e_field: 0.0,
        gamma: 0.0,
        alpha,
        alpha0: one,
        alpha1_tilde: Complex64::new(dt, 0.0),
        phi_over_dt: one,
        q_poly_coeffs,
        three_level,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexMatrix;

    fn spec(rows: &[Vec<f64>]) -> SpectralData {
        SpectralData::new(&ComplexMatrix::from_real_rows(rows).unwrap(), None).unwrap()
    }

    fn three_level() -> SpectralData {
        spec(&[
            vec![0.0, 1.0, 1.1],
            vec![1.0, 0.0, 1.0],
            vec![1.1, 1.0, 0.0],
        ])
    }

    #[test]
    fn zero_field_reports_limits() {
        let r = nsfd_report(0.05, 0.0, &three_level()).unwrap();
        assert_eq!(
            r.alpha,
            vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0)
            ]
        );
        assert_eq!(r.phi_over_dt, Complex64::new(1.0, 0.0));
        assert_eq!(r.q_poly_coeffs[1], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn two_level_closed_form() {
        // Nodes ±1: α₀ = cos γ, α₁ = i sin γ, so Φ/Δt = tan γ / γ.
        let s = spec(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let (dt, e) = (0.1, 2.0);
        let r = nsfd_report(dt, e, &s).unwrap();
        let g: f64 = dt * e;
        assert!((r.alpha0 - Complex64::new(g.cos(), 0.0)).norm() < 1e-15);
        assert!((r.alpha[1] - Complex64::new(0.0, g.sin())).norm() < 1e-15);
        assert!((r.phi_over_dt - Complex64::new(g.tan() / g, 0.0)).norm() < 1e-14);
        assert!(r.three_level.is_none());
    }

    #[test]
    fn power_coefficients_rebuild_the_exponential() {
        let s = three_level();
        let r = nsfd_report(0.1, 1.3, &s).unwrap();
        let p = s.polarizability();
        let mut rebuilt = ComplexMatrix::identity(3).scale(r.alpha[0]);
        rebuilt.add_scaled(r.alpha[1], p);
        rebuilt.add_scaled(r.alpha[2], &p.matmul(p));
        assert!((&rebuilt - &s.unitary_exponential(r.gamma)).max_abs() < 1e-13);
    }

    #[test]
    fn three_level_parameters_approach_limits() {
        let r = nsfd_report(1e-4, 1.0, &three_level()).unwrap();
        let t = r.three_level.unwrap();
        assert!((t.alpha - 1.0).norm() < 1e-6);
        assert!((t.xi - 0.5).norm() < 1e-6);
        assert!((t.beta / r.dt - 1.0).norm() < 1e-6);
    }

    #[test]
    fn degenerate_spectrum_has_no_three_level_block() {
        let s = spec(&[
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ]);
        let r = nsfd_report(0.05, 1.0, &s).unwrap();
        assert!(r.three_level.is_none());
        assert_eq!(r.alpha.len(), 3);
        assert_eq!(r.alpha[2], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn vanishing_alpha0_is_reported() {
        // Two-level: α₀ = cos γ vanishes at γ = π/2.
        let s = spec(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let err = nsfd_report(std::f64::consts::FRAC_PI_2, 1.0, &s).unwrap_err();
        assert!(matches!(
            err,
            Error::VanishingCoefficient {
                which: "alpha0",
                ..
            }
        ));
    }
}
