use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::canonical::canonical3_coefficients;
use super::cayley::{cayley, crank_nicolson_liouville};
use super::newton::{newton_polynomial, newton_polynomial_horner};
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{series_exponential, ComplexMatrix, SERIES_TOLERANCE};
use crate::spectral::SpectralData;

/// How the field-interaction exponential `exp(iγp)` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "exp")]
    Exponential,
    #[serde(rename = "cn")]
    CrankNicolson,
    #[serde(rename = "newton")]
    Newton,
    #[serde(rename = "canonical")]
    Canonical3,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Exponential,
        Method::CrankNicolson,
        Method::Newton,
        Method::Canonical3,
    ];

    /// Short name used on the command line and in configuration files.
    pub fn key(self) -> &'static str {
        match self {
            Method::Exponential => "exp",
            Method::CrankNicolson => "cn",
            Method::Newton => "newton",
            Method::Canonical3 => "canonical",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Method::Exponential => "Exponential",
            Method::CrankNicolson => "Crank-Nicolson",
            Method::Newton => "Newton",
            Method::Canonical3 => "Canonical",
        }
    }

    /// Methods whose sub-steps are exact unitary conjugations.
    pub fn is_exact(self) -> bool {
        !matches!(self, Method::CrankNicolson)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.key().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown method '{s}' (expected one of: exp, cn, newton, canonical)"
                ))
            })
    }
}

/// Evaluation route for [`Method::Exponential`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExponentialRoute {
    /// `U diag(e^{iγλ}) U†` from the cached eigendecomposition.
    #[default]
    Spectral,
    /// Scaling and squaring from scratch at every step.
    Series,
}

/// Evaluation route for [`Method::Newton`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NewtonEvaluation {
    /// Linear combination of the cached basis matrices `B_ℓ`.
    #[default]
    CachedBasis,
    /// Nested matrix Horner scheme rebuilt at every step.
    Horner,
}

/// One field-interaction (Liouville) step strategy over a shared spectral cache.
#[derive(Debug, Clone)]
pub struct LiouvilleStrategy {
    method: Method,
    spectral: Arc<SpectralData>,
    p_squared: Option<ComplexMatrix>,
    exponential_route: ExponentialRoute,
    newton_evaluation: NewtonEvaluation,
}

impl LiouvilleStrategy {
    pub fn new(method: Method, spectral: Arc<SpectralData>) -> Result<Self> {
        let p_squared = if method == Method::Canonical3 {
            if spectral.dim() != 3 {
                return Err(Error::DimensionMismatch {
                    expected: 3,
                    found: spectral.dim(),
                });
            }
            let p = spectral.polarizability();
            Some(p.matmul(p))
        } else {
            None
        };
        Ok(Self {
            method,
            spectral,
            p_squared,
            exponential_route: ExponentialRoute::default(),
            newton_evaluation: NewtonEvaluation::default(),
        })
    }

    pub fn with_exponential_route(mut self, route: ExponentialRoute) -> Self {
        self.exponential_route = route;
        self
    }

    pub fn with_newton_evaluation(mut self, evaluation: NewtonEvaluation) -> Self {
        self.newton_evaluation = evaluation;
        self
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn spectral(&self) -> &SpectralData {
        &self.spectral
    }

    pub fn dim(&self) -> usize {
        self.spectral.dim()
    }

    /// The matrix standing for `exp(iγp)`, where `γ = Δt·E^{n+1/2}`.
    pub fn conjugation_matrix(&self, gamma: f64) -> Result<ComplexMatrix> {
        let n = self.dim();
        if gamma == 0.0 {
            return Ok(ComplexMatrix::identity(n));
        }
        if !gamma.is_finite() {
            return Err(Error::InvalidSignal(format!(
                "non-finite step phase {gamma}"
            )));
        }
        match self.method {
            Method::Exponential => Ok(match self.exponential_route {
                ExponentialRoute::Spectral => self.spectral.unitary_exponential(gamma),
                ExponentialRoute::Series => series_exponential(
                    &self
                        .spectral
                        .polarizability()
                        .scale(Complex64::new(0.0, gamma)),
                    SERIES_TOLERANCE,
                ),
            }),
            Method::Newton => match self.newton_evaluation {
                NewtonEvaluation::CachedBasis => newton_polynomial(gamma, &self.spectral),
                NewtonEvaluation::Horner => newton_polynomial_horner(gamma, &self.spectral),
            },
            Method::Canonical3 => {
                let ev = self.spectral.eigenvalues();
                let [a0, a1, a2] = canonical3_coefficients(gamma, [ev[0], ev[1], ev[2]])?;
                let p_squared = self.p_squared.as_ref().expect("built for Canonical3");
                let mut out = ComplexMatrix::identity(n).scale(a0);
                out.add_scaled(a1, self.spectral.polarizability());
                out.add_scaled(a2, p_squared);
                Ok(out)
            }
            Method::CrankNicolson => cayley(gamma, self.spectral.polarizability()),
        }
    }

    /// Advances the Liouville flow by one step of phase `γ`.
    ///
    /// The exact methods apply `ρ ← M† ρ M` with `M` from
    /// [`conjugation_matrix`](Self::conjugation_matrix). Crank–Nicolson applies
    /// the classical trapezoidal discretisation of `∂ρ = −i[V, ρ]` instead (see
    /// [`crank_nicolson_liouville`]); unlike a conjugation by the Cayley
    /// matrix it does not preserve the spectrum of `ρ`.
    pub fn liouville_step(&self, rho: &DensityMatrix, gamma: f64) -> Result<DensityMatrix> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rho.dim(),
            });
        }
        if gamma == 0.0 {
            return Ok(rho.clone());
        }
        let stepped = match self.method {
            Method::CrankNicolson => {
                if !gamma.is_finite() {
                    return Err(Error::InvalidSignal(format!(
                        "non-finite step phase {gamma}"
                    )));
                }
                crank_nicolson_liouville(gamma, &self.spectral, rho.matrix())
            }
            _ => {
                let m = self.conjugation_matrix(gamma)?;
                m.adjoint_matmul(&rho.matrix().matmul(&m))
            }
        };
        Ok(DensityMatrix::from_evolved(stepped))
    }
}
