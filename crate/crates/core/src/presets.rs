//! Systems used by the experiments.

use std::f64::consts::PI;

use crate::linalg::ComplexMatrix;

#[cfg(feature = "harness")]
const MAX_DRAWS: usize = 1000;

/// `[[0, 1, 1.1], [1, 0, 1], [1.1, 1, 0]]`, three distinct eigenvalues.
pub fn three_level_polarizability() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        vec![0.0, 1.0, 1.1],
        vec![1.0, 0.0, 1.0],
        vec![1.1, 1.0, 0.0],
    ])
    .expect("valid preset")
}

/// All-ones off the diagonal; eigenvalues −1 (double) and 2.
pub fn degenerate_polarizability() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        vec![0.0, 1.0, 1.0],
        vec![1.0, 0.0, 1.0],
        vec![1.0, 1.0, 0.0],
    ])
    .expect("valid preset")
}

/// `ω_j = jπ`; for three levels this is `(0, π, 2π)`.
pub fn ladder_frequencies(n: usize) -> Vec<f64> {
    (0..n).map(|j| j as f64 * PI).collect()
}

/// Real symmetric zero-diagonal `p` with off-diagonal entries uniform in
/// `[0.5, 1.5]`, redrawn until adjacent eigenvalues are further apart than
/// `1e−6 · max(1, spectral radius)`.
#[cfg(feature = "harness")]
pub fn random_polarizability(n: usize, seed: u64) -> crate::error::Result<ComplexMatrix> {
    use crate::error::Error;
    use crate::linalg::eigendecompose_hermitian;
    use crate::propagators::CANONICAL_GAP_TOLERANCE;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    if n < 2 {
        return Err(Error::Config(format!("need at least 2 levels, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_DRAWS {
        let mut rows = vec![vec![0.0; n]; n];
        for j in 0..n {
            for k in j + 1..n {
                let v = rng.gen_range(0.5..=1.5);
                rows[j][k] = v;
                rows[k][j] = v;
            }
        }
        let p = ComplexMatrix::from_real_rows(&rows)?;
        let ev = eigendecompose_hermitian(&p)?.eigenvalues;
        let radius = ev.iter().fold(1.0_f64, |acc, x| acc.max(x.abs()));
        let min_gap = ev
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        if min_gap > CANONICAL_GAP_TOLERANCE * radius {
            return Ok(p);
        }
    }
    Err(Error::Config(format!(
        "no well-separated {n}-level polarizability after {MAX_DRAWS} draws"
    )))
}
