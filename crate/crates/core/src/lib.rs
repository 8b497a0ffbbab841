//! Strang splitting for the N-level Bloch equation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod density;
pub mod error;
#[cfg(feature = "harness")]
pub mod harness;
pub mod linalg;
pub mod presets;
pub mod propagators;
pub mod spectral;
pub mod splitting;
pub mod system;

pub use density::{diagnostics, DensityMatrix, Diagnostics};
pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use spectral::{spectral_precompute, SpectralData};
pub use system::LevelSystem;
