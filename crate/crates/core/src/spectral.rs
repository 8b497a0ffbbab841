//! Offline spectral cache of the polarizability matrix.
//!
//! Everything here is independent of the field, so it is computed once before
//! time stepping: the eigendecomposition `p = U diag(λ) U†`, the deduplicated
//! interpolation nodes, and the Newton basis matrices
//! `B₀ = I, B_ℓ = B_{ℓ−1} (p − λ̂_ℓ I)`.

use num_complex::Complex64;

use crate::error::Result;
use crate::linalg::{eigendecompose_hermitian, ComplexMatrix};
use crate::system::LevelSystem;

/// Relative clustering tolerance for repeated eigenvalues.
pub const DEDUP_RELATIVE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct SpectralData {
    polarizability: ComplexMatrix,
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
    distinct_nodes: Vec<f64>,
    newton_basis: Vec<ComplexMatrix>,
    dedup_tol: f64,
}

/// Default node clustering tolerance: `1e−8 · max(1, spectral radius)`.
pub fn default_dedup_tolerance(eigenvalues: &[f64]) -> f64 {
    DEDUP_RELATIVE_TOLERANCE * spectral_scale(eigenvalues)
}

/// `max(1, spectral radius)`
pub fn spectral_scale(eigenvalues: &[f64]) -> f64 {
    eigenvalues.iter().fold(1.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn spectral_precompute(sys: &LevelSystem, dedup_tol: Option<f64>) -> Result<SpectralData> {
    SpectralData::new(sys.polarizability(), dedup_tol)
}

impl SpectralData {
    /// Decomposes `p` and builds the Newton basis. `dedup_tol = None` selects
    /// [`default_dedup_tolerance`].
    pub fn new(p: &ComplexMatrix, dedup_tol: Option<f64>) -> Result<Self> {
        let eigen = eigendecompose_hermitian(p)?;
        let dedup_tol = dedup_tol.unwrap_or_else(|| default_dedup_tolerance(&eigen.eigenvalues));
        let distinct_nodes = cluster_nodes(&eigen.eigenvalues, dedup_tol);

        let n = p.dim();
        let mut newton_basis = Vec::with_capacity(distinct_nodes.len());
        newton_basis.push(ComplexMatrix::identity(n));
        for &node in &distinct_nodes[..distinct_nodes.len() - 1] {
            let factor = p.shifted(Complex64::new(-node, 0.0));
            let next = newton_basis
                .last()
                .expect("basis starts with I")
                .matmul(&factor);
            newton_basis.push(next);
        }

        Ok(Self {
            polarizability: p.clone(),
            eigenvalues: eigen.eigenvalues,
            eigenvectors: eigen.eigenvectors,
            distinct_nodes,
            newton_basis,
            dedup_tol,
        })
    }

    pub fn dim(&self) -> usize {
        self.polarizability.dim()
    }

    pub fn polarizability(&self) -> &ComplexMatrix {
        &self.polarizability
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    pub fn distinct_nodes(&self) -> &[f64] {
        &self.distinct_nodes
    }

    pub fn newton_basis(&self) -> &[ComplexMatrix] {
        &self.newton_basis
    }

    pub fn dedup_tol(&self) -> f64 {
        self.dedup_tol
    }

    pub fn spectral_scale(&self) -> f64 {
        spectral_scale(&self.eigenvalues)
    }

    /// Smallest gap between consecutive eigenvalues (before deduplication).
    pub fn min_eigenvalue_gap(&self) -> f64 {
        self.eigenvalues
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// Reference route: `exp(iγp) = U diag(e^{iγλ_k}) U†`.
    pub fn unitary_exponential(&self, gamma: f64) -> ComplexMatrix {
        let phases: Vec<Complex64> = self
            .eigenvalues
            .iter()
            .map(|&l| Complex64::from_polar(1.0, gamma * l))
            .collect();
        self.conjugate_diagonal(&phases)
    }

    /// `U diag(d) U†`
    pub(crate) fn conjugate_diagonal(&self, diag: &[Complex64]) -> ComplexMatrix {
        let u = &self.eigenvectors;
        let n = u.dim();
        let mut scaled = u.clone();
        for i in 0..n {
            for (j, &d) in diag.iter().enumerate() {
                scaled[(i, j)] *= d;
            }
        }
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += scaled[(i, k)] * u[(j, k)].conj();
                }
                out[(i, j)] = acc;
            }
        }
        out
    }
}

/// Single-linkage clustering of sorted values; each cluster is represented by
/// its mean.
fn cluster_nodes(sorted: &[f64], tol: f64) -> Vec<f64> {
    let mut nodes = Vec::new();
    let mut cluster: Vec<f64> = Vec::new();
    for &x in sorted {
        if let Some(&last) = cluster.last() {
            if x - last > tol {
                nodes.push(cluster.iter().sum::<f64>() / cluster.len() as f64);
                cluster.clear();
            }
        }
        cluster.push(x);
    }
    if !cluster.is_empty() {
        nodes.push(cluster.iter().sum::<f64>() / cluster.len() as f64);
    }
    nodes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{series_exponential, SERIES_TOLERANCE};
    use std::f64::consts::PI;

    fn real(rows: &[Vec<f64>]) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(rows).unwrap()
    }

    fn degenerate_p() -> ComplexMatrix {
        real(&[
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ])
    }

    fn three_level_p() -> ComplexMatrix {
        real(&[
            vec![0.0, 1.0, 1.1],
            vec![1.0, 0.0, 1.0],
            vec![1.1, 1.0, 0.0],
        ])
    }

    #[test]
    fn degenerate_spectrum_collapses_to_two_nodes() {
        let p = degenerate_p();
        let spec = SpectralData::new(&p, Some(1e-8)).unwrap();
        assert_eq!(spec.distinct_nodes().len(), 2);
        assert!((spec.distinct_nodes()[0] + 1.0).abs() < 1e-14);
        assert!((spec.distinct_nodes()[1] - 2.0).abs() < 1e-14);
        assert_eq!(spec.newton_basis().len(), 2);
        assert_eq!(spec.newton_basis()[0], ComplexMatrix::identity(3));
        let p_plus_i = p.shifted(Complex64::new(1.0, 0.0));
        assert!((&spec.newton_basis()[1] - &p_plus_i).max_abs() < 1e-14);
    }

    #[test]
    fn three_level_polarizability_has_three_nodes() {
        let spec = SpectralData::new(&three_level_p(), None).unwrap();
        assert_eq!(spec.distinct_nodes().len(), 3);
        assert!(spec.min_eigenvalue_gap() > 0.05);
    }

    #[test]
    fn two_level_nodes_and_basis() {
        let p = real(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let spec = SpectralData::new(&p, None).unwrap();
        assert_eq!(spec.distinct_nodes().len(), 2);
        assert!((spec.distinct_nodes()[0] + 1.0).abs() < 1e-15);
        assert!((spec.distinct_nodes()[1] - 1.0).abs() < 1e-15);
        let p_plus_i = p.shifted(Complex64::new(1.0, 0.0));
        assert!((&spec.newton_basis()[1] - &p_plus_i).max_abs() < 1e-15);
    }

    #[test]
    fn newton_basis_follows_recurrence() {
        let spec = SpectralData::new(&three_level_p(), None).unwrap();
        let p = spec.polarizability();
        for (l, pair) in spec.newton_basis().windows(2).enumerate() {
            let node = spec.distinct_nodes()[l];
            let expected = pair[0].matmul(&p.shifted(Complex64::new(-node, 0.0)));
            assert_eq!(pair[1], expected);
        }
    }

    #[test]
    fn eigen_invariants_hold() {
        let spec = SpectralData::new(&three_level_p(), None).unwrap();
        let u = spec.eigenvectors();
        let p = spec.polarizability();
        let pu = p.matmul(u);
        let ud = u.matmul(&ComplexMatrix::from_real_diagonal(spec.eigenvalues()));
        assert!((&pu - &ud).norm_inf() <= 1e-10 * p.norm_inf());
        let gram = u.matmul(&u.adjoint());
        assert!((&gram - &ComplexMatrix::identity(3)).norm_inf() <= 1e-10);
    }

    #[test]
    fn unitary_exponential_at_zero_is_identity() {
        let spec = SpectralData::new(&three_level_p(), None).unwrap();
        let e = spec.unitary_exponential(0.0);
        assert!((&e - &ComplexMatrix::identity(3)).max_abs() < 1e-15);
    }

    #[test]
    fn involutory_p_at_pi_gives_minus_identity() {
        // exp(iγp) = cos γ I + i sin γ p for p² = I.
        let p = real(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let spec = SpectralData::new(&p, None).unwrap();
        let e = spec.unitary_exponential(PI);
        let minus_i = ComplexMatrix::identity(2).scale_real(-1.0);
        assert!((&e - &minus_i).max_abs() < 1e-14);
        let series = series_exponential(&p.scale(Complex64::new(0.0, PI)), SERIES_TOLERANCE);
        assert!((&e - &series).max_abs() < 1e-13);
    }

    #[test]
    fn unitary_exponential_matches_series_oracle() {
        let p = three_level_p();
        let spec = SpectralData::new(&p, None).unwrap();
        for gamma in [0.3, 0.7] {
            let spectral = spec.unitary_exponential(gamma);
            let series = series_exponential(&p.scale(Complex64::new(0.0, gamma)), SERIES_TOLERANCE);
            assert!((&spectral - &series).max_abs() < 1e-12, "gamma = {gamma}");
        }
    }

    #[test]
    fn clustering_merges_close_values() {
        assert_eq!(cluster_nodes(&[-1.0, -1.0 + 1e-12, 2.0], 1e-8).len(), 2);
        assert_eq!(cluster_nodes(&[0.0, 1.0, 2.0], 1e-8), vec![0.0, 1.0, 2.0]);
    }
}
