use crate::error::{Error, Result};
use crate::linalg::{check_hermitian, ComplexMatrix};
use crate::propagators::RelaxationModel;

/// Free Hamiltonian, polarizability and relaxation of an N-level system.
///
/// `H₀ = diag(ω_j)`; the interaction is `V(t) = E(t)·p`.
#[derive(Debug, Clone)]
pub struct LevelSystem {
    omega: Vec<f64>,
    polarizability: ComplexMatrix,
    relaxation: RelaxationModel,
}

impl LevelSystem {
    pub fn new(
        omega: Vec<f64>,
        polarizability: ComplexMatrix,
        relaxation: RelaxationModel,
    ) -> Result<Self> {
        let n = omega.len();
        if n < 2 {
            return Err(Error::InvalidMatrix(format!(
                "a level system needs at least 2 levels, got {n}"
            )));
        }
        if polarizability.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: polarizability.dim(),
            });
        }
        if omega.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidMatrix(
                "level frequencies must be finite".into(),
            ));
        }
        if !polarizability.is_finite() {
            return Err(Error::InvalidMatrix("polarizability must be finite".into()));
        }
        check_hermitian(&polarizability, 1e-12)?;
        let scale = polarizability.max_abs().max(1.0);
        if let Some(j) = (0..n).find(|&j| polarizability[(j, j)].norm() > 1e-14 * scale) {
            return Err(Error::InvalidMatrix(format!(
                "polarizability must have a zero diagonal (entry {j} is {})",
                polarizability[(j, j)]
            )));
        }
        relaxation.validate(n)?;
        Ok(Self {
            omega,
            polarizability,
            relaxation,
        })
    }

    pub fn n_levels(&self) -> usize {
        self.omega.len()
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn polarizability(&self) -> &ComplexMatrix {
        &self.polarizability
    }

    pub fn relaxation(&self) -> &RelaxationModel {
        &self.relaxation
    }

    /// Same system with every level frequency negated (used for time reversal).
    pub fn with_negated_frequencies(&self) -> Self {
        Self {
            omega: self.omega.iter().map(|w| -w).collect(),
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn rejects_nonzero_diagonal() {
        let p = ComplexMatrix::from_real_rows(&[vec![0.5, 1.0], vec![1.0, 0.0]]).unwrap();
        let err = LevelSystem::new(vec![0.0, 1.0], p, RelaxationModel::None).unwrap_err();
        assert!(matches!(err, Error::InvalidMatrix(_)));
    }

    #[test]
    fn rejects_non_hermitian_polarizability() {
        let p = ComplexMatrix::from_rows(&[
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 1.0)],
            vec![Complex64::new(1.0, 1.0), Complex64::new(0.0, 0.0)],
        ])
        .unwrap();
        let err = LevelSystem::new(vec![0.0, 1.0], p, RelaxationModel::None).unwrap_err();
        assert!(matches!(err, Error::NotHermitian { .. }));
    }

    #[test]
    fn rejects_dimension_mismatch() {
        let p = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let err = LevelSystem::new(vec![0.0, 1.0, 2.0], p, RelaxationModel::None).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }
}
