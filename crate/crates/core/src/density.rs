use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_part_eigenvalues, ComplexMatrix};

/// Tolerance applied to the structural checks at construction.
pub const CONSTRUCTION_TOLERANCE: f64 = 1e-12;

/// Hermitian, unit-trace, positive semidefinite state.
///
/// The checks run only in [`DensityMatrix::new`]. States produced by the
/// propagators are wrapped without re-validation or repair, so any drift they
/// introduce stays visible to [`diagnostics`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.dim() < 2 {
            return Err(Error::InvalidMatrix(
                "density matrix must be at least 2x2".into(),
            ));
        }
        if !matrix.is_finite() {
            return Err(Error::InvalidMatrix("entries must be finite".into()));
        }
        let d = diagnostics(&matrix);
        if d.hermiticity_defect > CONSTRUCTION_TOLERANCE {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (defect {:.3e})",
                d.hermiticity_defect
            )));
        }
        if d.trace_error > CONSTRUCTION_TOLERANCE {
            return Err(Error::InvalidDensity(format!(
                "trace differs from one by {:.3e}",
                d.trace_error
            )));
        }
        if d.min_eigenvalue < -CONSTRUCTION_TOLERANCE {
            return Err(Error::InvalidDensity(format!(
                "not positive semidefinite (smallest eigenvalue {:.3e})",
                d.min_eigenvalue
            )));
        }
        Ok(Self { matrix })
    }

    /// Diagonal state with the given populations.
    pub fn from_populations(populations: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diagonal(populations))
    }

    /// Pure state concentrated on `level`.
    pub fn pure_level(n_levels: usize, level: usize) -> Result<Self> {
        if level >= n_levels {
            return Err(Error::InvalidDensity(format!(
                "level {level} out of range for {n_levels} levels"
            )));
        }
        let mut pops = vec![0.0; n_levels];
        pops[level] = 1.0;
        Self::from_populations(&pops)
    }

    pub(crate) fn from_evolved(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    /// Upper-triangle coherences `ρ_jk, j < k`, row-major.
    pub fn coherences(&self) -> Vec<Complex64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for j in 0..n {
            for k in j + 1..n {
                out.push(self.matrix[(j, k)]);
            }
        }
        out
    }

    pub fn diagnostics(&self) -> Diagnostics {
        diagnostics(&self.matrix)
    }
}

/// Conservation diagnostics of a (possibly drifted) state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub hermiticity_defect: f64,
    pub trace_error: f64,
    /// Smallest eigenvalue of the Hermitian part `(ρ + ρ†)/2`.
    pub min_eigenvalue: f64,
}

pub fn diagnostics(rho: &ComplexMatrix) -> Diagnostics {
    let min_eigenvalue = hermitian_part_eigenvalues(rho)
        .ok()
        .and_then(|ev| ev.first().copied())
        .unwrap_or(f64::NAN);
    Diagnostics {
        hermiticity_defect: rho.hermiticity_defect(),
        trace_error: (rho.trace() - Complex64::new(1.0, 0.0)).norm(),
        min_eigenvalue,
    }
}
