//! Small dense complex linear algebra.

mod eigen;
mod expm;
mod matrix;

pub use eigen::{
    check_hermitian, eigendecompose_hermitian, hermitian_part_eigenvalues, HermitianEigen,
    HERMITIAN_TOLERANCE,
};
pub use expm::{series_exponential, SERIES_TOLERANCE};
pub use matrix::ComplexMatrix;
