use thiserror::Error;

/// Errors raised by the model and its numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("empty sample range: {0}")]
    EmptyRange(String),

    #[error("operation requires a Gaussian switching function")]
    RequiresGaussianSwitching,

    #[error("mode frequency vanishes at k = {k}; the amplitude is infrared singular")]
    InfraredSingular { k: f64 },

    #[error(
        "quadrature did not converge: error estimate {error_estimate:e} after {evaluations} evaluations"
    )]
    QuadratureNotConverged {
        error_estimate: f64,
        evaluations: usize,
    },

    #[error("joint excitation probability {0} exceeds one; couplings are not perturbative")]
    NotPerturbative(f64),

    #[error("energy gap {delta_e} does not exceed the field mass {mass}; no on-shell mode")]
    BelowMassShell { delta_e: f64, mass: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn require_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(invalid(name, format!("must be finite, got {value}")))
    }
}
