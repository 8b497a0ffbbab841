use num_complex::Complex64;

use super::ComplexMatrix;

/// Default truncation tolerance of [`series_exponential`].
pub const SERIES_TOLERANCE: f64 = 1e-14;

const MAX_TAYLOR_ORDER: usize = 60;

/// Matrix exponential by scaling and squaring around a truncated Taylor series.
///
/// The matrix is halved `s = max(0, ⌈log₂ ‖m‖₁⌉)` times so that the scaled
/// norm is at most one, the Taylor order is the smallest `K` whose remainder
/// bound `ν^{K+1} / ((K+1)! (1 − ν/(K+2)))` falls below `tol`, and the result
/// is squared `s` times. This path never touches an eigendecomposition, which
/// makes it usable as an oracle for the spectral routes.
pub fn series_exponential(m: &ComplexMatrix, tol: f64) -> ComplexMatrix {
    let n = m.dim();
    let norm = m.norm_one();
    if norm == 0.0 {
        return ComplexMatrix::identity(n);
    }
    let halvings = norm.log2().ceil().max(0.0) as i32;
    let scaled_norm = norm / 2f64.powi(halvings);
    let order = taylor_order(scaled_norm, tol);
    let scaled = m.scale_real(2f64.powi(-halvings));

    // Horner form of Σ_{k≤K} A^k / k!: I + A/1 (I + A/2 (I + … (I + A/K))).
    let mut acc = ComplexMatrix::identity(n);
    for k in (1..=order).rev() {
        acc = scaled
            .matmul(&acc)
            .scale(Complex64::new(1.0 / k as f64, 0.0))
            .shifted(Complex64::new(1.0, 0.0));
    }
    for _ in 0..halvings {
        acc = acc.matmul(&acc);
    }
    acc
}

fn taylor_order(nu: f64, tol: f64) -> usize {
    // term = ν^{K+1} / (K+1)!
    let mut term = nu;
    for k in 0..MAX_TAYLOR_ORDER {
        let tail = 1.0 - nu / (k as f64 + 2.0);
        if term / tail < tol {
            return k;
        }
        term *= nu / (k as f64 + 2.0);
    }
    MAX_TAYLOR_ORDER
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_matrix_gives_identity() {
        let e = series_exponential(&ComplexMatrix::zeros(3), SERIES_TOLERANCE);
        assert_eq!(e, ComplexMatrix::identity(3));
    }

    #[test]
    fn diagonal_imaginary_matrix() {
        let (a, b) = (0.7, -2.3);
        let m = ComplexMatrix::from_diagonal(&[c(0.0, a), c(0.0, b)]);
        let e = series_exponential(&m, SERIES_TOLERANCE);
        assert!((e[(0, 0)] - c(0.0, a).exp()).norm() < 1e-13);
        assert!((e[(1, 1)] - c(0.0, b).exp()).norm() < 1e-13);
        assert_eq!(e[(0, 1)], c(0.0, 0.0));
    }

    #[test]
    fn nilpotent_matrix_is_exact() {
        let m = ComplexMatrix::from_real_rows(&[vec![0.0, 5.0], vec![0.0, 0.0]]).unwrap();
        let e = series_exponential(&m, SERIES_TOLERANCE);
        let expected = ComplexMatrix::from_real_rows(&[vec![1.0, 5.0], vec![0.0, 1.0]]).unwrap();
        assert!((&e - &expected).max_abs() < 1e-13);
    }

    #[test]
    fn rotation_generator_gives_cos_sin() {
        // exp([[0, -θ], [θ, 0]]) = [[cos θ, -sin θ], [sin θ, cos θ]]
        let theta = 3.7;
        let m = ComplexMatrix::from_real_rows(&[vec![0.0, -theta], vec![theta, 0.0]]).unwrap();
        let e = series_exponential(&m, SERIES_TOLERANCE);
        let (s, co) = theta.sin_cos();
        let expected = ComplexMatrix::from_real_rows(&[vec![co, -s], vec![s, co]]).unwrap();
        assert!((&e - &expected).max_abs() < 1e-13);
    }

    #[test]
    fn taylor_order_grows_with_tightness() {
        assert!(taylor_order(1.0, 1e-14) > taylor_order(1.0, 1e-6));
        assert!(taylor_order(0.01, 1e-14) < taylor_order(1.0, 1e-14));
    }
}
