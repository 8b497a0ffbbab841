use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (defect {defect:.3e} exceeds {tolerance:.3e})")]
    NotHermitian { defect: f64, tolerance: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid relaxation rates: {0}")]
    InvalidRates(String),

    #[error("degenerate spectrum: minimum node gap {min_gap:.3e} below threshold {threshold:.3e}")]
    DegenerateSpectrum { min_gap: f64, threshold: f64 },

    #[error("interpolation nodes {a} and {b} collide")]
    NodeCollision { a: f64, b: f64 },

    #[error("resolvent matrix is singular")]
    SingularResolvent,

    #[error("NSFD coefficient {which} vanishes (|value| = {magnitude:.3e})")]
    VanishingCoefficient { which: &'static str, magnitude: f64 },

    #[error("time {t} lies outside the tabulated field range [{start}, {end}]")]
    OutOfRange { t: f64, start: f64, end: f64 },

    #[error("invalid field signal: {0}")]
    InvalidSignal(String),

    #[error("invalid step plan: {0}")]
    InvalidPlan(String),

    #[error(
        "errors are at the noise floor (max error {max_error:.3e}); order estimate is meaningless"
    )]
    InsufficientResolution { max_error: f64 },

    #[error("step {step} failed: {source}")]
    StepFailed {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Whether the error comes from the numerics rather than from input or IO.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NoConvergence { .. }
            | Error::DegenerateSpectrum { .. }
            | Error::NodeCollision { .. }
            | Error::SingularResolvent
            | Error::VanishingCoefficient { .. }
            | Error::InsufficientResolution { .. } => true,
            Error::StepFailed { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
