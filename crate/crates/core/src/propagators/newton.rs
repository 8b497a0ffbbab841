//! Newton interpolation of `x ↦ e^{iγx}` on the spectrum of `p`.
//!
//! Because `p` is Hermitian its minimal polynomial has simple roots, so the
//! interpolant on the distinct eigenvalues, evaluated at `p`, is exactly
//! `exp(iγp)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::spectral::SpectralData;

/// Nodes closer than this many ulps of the node scale are rejected.
const COLLISION_ULPS: f64 = 64.0;

/// Divided differences `(f[λ₁], f[λ₁,λ₂], …, f[λ₁,…,λ_M])` of `f(x) = e^{iγx}`.
pub fn newton_divided_differences(gamma: f64, nodes: &[f64]) -> Result<Vec<Complex64>> {
    check_nodes(nodes)?;
    let mut table: Vec<Complex64> = nodes
        .iter()
        .map(|&x| Complex64::from_polar(1.0, gamma * x))
        .collect();
    // After pass `order`, table[k] holds f[λ_{k−order}, …, λ_k] for k ≥ order.
    for order in 1..nodes.len() {
        for k in (order..nodes.len()).rev() {
            table[k] = (table[k] - table[k - 1]) / (nodes[k] - nodes[k - order]);
        }
    }
    Ok(table)
}

fn check_nodes(nodes: &[f64]) -> Result<()> {
    let scale = nodes.iter().fold(1.0_f64, |acc, x| acc.max(x.abs()));
    let floor = COLLISION_ULPS * f64::EPSILON * scale;
    for (i, &a) in nodes.iter().enumerate() {
        for &b in &nodes[i + 1..] {
            if (a - b).abs() <= floor {
                return Err(Error::NodeCollision { a, b });
            }
        }
    }
    Ok(())
}

/// `𝒫_γ(p) = Σ_ℓ c_ℓ B_ℓ` over the cached Newton basis.
pub fn newton_polynomial(gamma: f64, spec: &SpectralData) -> Result<ComplexMatrix> {
    let coeffs = newton_divided_differences(gamma, spec.distinct_nodes())?;
    let mut acc = ComplexMatrix::zeros(spec.dim());
    for (c, basis) in coeffs.iter().zip(spec.newton_basis()) {
        acc.add_scaled(*c, basis);
    }
    Ok(acc)
}

/// Nested Horner evaluation
/// `c₀ + (p − λ₁)(c₁ + (p − λ₂)(c₂ + … + (p − λ_{M−1}) c_{M−1}))`,
/// rebuilding the matrix products at every call.
pub fn newton_polynomial_horner(gamma: f64, spec: &SpectralData) -> Result<ComplexMatrix> {
    let nodes = spec.distinct_nodes();
    let coeffs = newton_divided_differences(gamma, nodes)?;
    let p = spec.polarizability();
    let n = spec.dim();
    let last = coeffs.len() - 1;
    let mut acc = ComplexMatrix::identity(n).scale(coeffs[last]);
    for l in (0..last).rev() {
        acc = p
            .shifted(Complex64::new(-nodes[l], 0.0))
            .matmul(&acc)
            .shifted(coeffs[l]);
    }
    Ok(acc)
}

/// Expands a Newton-form polynomial into power-basis coefficients (lowest
/// degree first) by synthetic multiplication with the linear factors.
pub fn newton_to_power_basis(coeffs: &[Complex64], nodes: &[f64]) -> Vec<Complex64> {
    let Some((&top, rest)) = coeffs.split_last() else {
        return Vec::new();
    };
    let mut poly = vec![top];
    for (l, &c) in rest.iter().enumerate().rev() {
        // poly ← poly · (x − λ_l) + c
        let shift = nodes[l];
        let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
        for (i, &a) in poly.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= a * shift;
        }
        next[0] += c;
        poly = next;
    }
    poly
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: &[Vec<f64>]) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(rows).unwrap()
    }

    /// Solves the Vandermonde system Σ_j a_j x_k^j = e^{iγx_k} by Gaussian
    /// elimination, independently of the divided-difference recursion.
    fn vandermonde_coefficients(gamma: f64, nodes: &[f64]) -> Vec<Complex64> {
        let m = nodes.len();
        let v = ComplexMatrix::from_fn(m, |k, j| Complex64::new(nodes[k].powi(j as i32), 0.0));
        let rhs = ComplexMatrix::from_fn(m, |k, j| {
            if j == 0 {
                Complex64::from_polar(1.0, gamma * nodes[k])
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let sol = v.solve(&rhs).unwrap();
        (0..m).map(|k| sol[(k, 0)]).collect()
    }

    #[test]
    fn zero_gamma_interpolates_constant() {
        let c = newton_divided_differences(0.0, &[-1.0, 0.5, 2.0, 3.0]).unwrap();
        assert_eq!(c[0], Complex64::new(1.0, 0.0));
        assert!(c[1..].iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn two_symmetric_nodes_by_hand() {
        let gamma = 0.37;
        let c = newton_divided_differences(gamma, &[-1.0, 1.0]).unwrap();
        assert!((c[0] - Complex64::from_polar(1.0, -gamma)).norm() < 1e-16);
        assert!((c[1] - Complex64::new(0.0, gamma.sin())).norm() < 1e-16);
    }

    #[test]
    fn matches_vandermonde_solve_in_power_basis() {
        let nodes = [0.0, 1.0, 2.0];
        let gamma = 0.5;
        let c = newton_divided_differences(gamma, &nodes).unwrap();
        let power = newton_to_power_basis(&c, &nodes);
        let oracle = vandermonde_coefficients(gamma, &nodes);
        for (a, b) in power.iter().zip(&oracle) {
            assert!((a - b).norm() < 1e-14, "{a} vs {b}");
        }
    }

    #[test]
    fn power_basis_reproduces_values_at_nodes() {
        let nodes = [-1.7, -0.2, 0.4, 1.9];
        let gamma = 1.3;
        let c = newton_divided_differences(gamma, &nodes).unwrap();
        let power = newton_to_power_basis(&c, &nodes);
        for &x in &nodes {
            let value: Complex64 = power
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * x + a);
            assert!((value - Complex64::from_polar(1.0, gamma * x)).norm() < 1e-13);
        }
    }

    #[test]
    fn colliding_nodes_are_rejected() {
        assert!(matches!(
            newton_divided_differences(0.1, &[1.0, 1.0]),
            Err(Error::NodeCollision { .. })
        ));
    }

    #[test]
    fn degenerate_polarizability_uses_two_terms() {
        let p = real(&[
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ]);
        let spec = SpectralData::new(&p, None).unwrap();
        let gamma = 0.4;
        let newton = newton_polynomial(gamma, &spec).unwrap();
        let f_m1 = Complex64::from_polar(1.0, -gamma);
        let f_2 = Complex64::from_polar(1.0, 2.0 * gamma);
        let mut by_hand = ComplexMatrix::identity(3).scale(f_m1);
        by_hand.add_scaled(
            (f_m1 - f_2) / (-1.0 - 2.0),
            &p.shifted(Complex64::new(1.0, 0.0)),
        );
        assert!((&newton - &by_hand).max_abs() < 1e-15);
        assert!((&newton - &spec.unitary_exponential(gamma)).max_abs() < 1e-12);
    }

    #[test]
    fn horner_and_cached_basis_agree() {
        let p = real(&[
            vec![0.0, 1.0, 1.1],
            vec![1.0, 0.0, 1.0],
            vec![1.1, 1.0, 0.0],
        ]);
        let spec = SpectralData::new(&p, None).unwrap();
        for gamma in [0.0, 0.05, 0.31, 1.7] {
            let cached = newton_polynomial(gamma, &spec).unwrap();
            let horner = newton_polynomial_horner(gamma, &spec).unwrap();
            assert!((&cached - &horner).max_abs() < 1e-13);
        }
    }
}
