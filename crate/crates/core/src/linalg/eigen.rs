//! Cyclic Jacobi eigensolver for small Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary, then annihilates the (now real) pivot with a plane rotation. The
//! sweep order is fixed (row-major over the strict upper triangle), so the
//! output is a deterministic function of the input bits.

use std::cmp::Ordering;

use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 64;

/// Relative Hermiticity tolerance accepted on input.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// Eigenvalues closer than this (relative to the spectral scale) are treated as
/// a tie when ordering eigenpairs.
const TIE_TOLERANCE: f64 = 1e-12;

/// Eigendecomposition `m = U diag(λ) U†` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Columns are the eigenvectors, phase-normalised.
    pub eigenvectors: ComplexMatrix,
}

pub fn check_hermitian(m: &ComplexMatrix, relative_tol: f64) -> Result<()> {
    let tolerance = relative_tol * m.norm_inf();
    let defect = m.hermiticity_defect();
    if defect > tolerance {
        return Err(Error::NotHermitian { defect, tolerance });
    }
    Ok(())
}

pub fn eigendecompose_hermitian(m: &ComplexMatrix) -> Result<HermitianEigen> {
    check_hermitian(m, HERMITIAN_TOLERANCE)?;
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);

    let total = a.norm_frobenius();
    let mut sweeps = 0;
    while off_diagonal_norm(&a) > f64::EPSILON * total {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
    }

    let eigenvalues: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut vectors: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            let mut col: Vec<Complex64> = (0..n).map(|i| v[(i, j)]).collect();
            normalise_phase(&mut col);
            col
        })
        .collect();

    let scale = eigenvalues.iter().fold(1.0_f64, |acc, x| acc.max(x.abs()));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eigenvalues[i].total_cmp(&eigenvalues[j]));
    // Within clusters of (numerically) equal eigenvalues, order the
    // eigenvectors lexicographically so the result does not depend on which
    // rotation happened to separate them.
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n
            && (eigenvalues[order[end]] - eigenvalues[order[end - 1]]).abs()
                <= TIE_TOLERANCE * scale
        {
            end += 1;
        }
        order[start..end].sort_by(|&i, &j| lexicographic(&vectors[i], &vectors[j]));
        start = end;
    }

    let sorted_values: Vec<f64> = order.iter().map(|&k| eigenvalues[k]).collect();
    let sorted_vectors: Vec<Vec<Complex64>> = order
        .iter()
        .map(|&k| std::mem::take(&mut vectors[k]))
        .collect();
    let eigenvectors = ComplexMatrix::from_fn(n, |i, j| sorted_vectors[j][i]);

    Ok(HermitianEigen {
        eigenvalues: sorted_values,
        eigenvectors,
    })
}

/// Eigenvalues only, for diagnostics on matrices that may have drifted off
/// Hermiticity: the Hermitian part is decomposed.
pub fn hermitian_part_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(eigendecompose_hermitian(&m.hermitian_part())?.eigenvalues)
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Applies one two-sided rotation `a ← G† a G`, `v ← v G` zeroing `a[p][q]`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let z = a[(p, q)];
    let r = z.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = z / r;

    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // G = diag(1, conj(phase)) on (p, q), then the real rotation [[c, s], [-s, c]].
    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = -phase.conj() * s;
    let g_qq = phase.conj() * c;

    let n = a.dim();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// Makes the first non-negligible component real and positive.
fn normalise_phase(col: &mut [Complex64]) {
    let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if let Some(lead) = col.iter().find(|z| z.norm() > 1e-8 * norm).copied() {
        let phase = lead.conj() / lead.norm();
        for z in col.iter_mut() {
            *z *= phase;
        }
    }
}

fn lexicographic(a: &[Complex64], b: &[Complex64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let ord = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if ord != Ordering::Equal {
            return ord;
        }
    }
    Ordering::Equal
}
