use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PinError {
    #[error("invalid value for `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("inter-arrival law is not normalized: mass {mass} + K(inf) {k_infinity} != 1")]
    Normalization { mass: f64, k_infinity: f64 },

    #[error("tilted law has mass {mass} > 1 (decay too small for this pinning)")]
    TiltOverflow { mass: f64 },

    #[error("tail tolerance {requested:e} unreachable (best estimate {achievable:e})")]
    TailTolerance { requested: f64, achievable: f64 },

    #[error("law is not persistent (K(inf) = {k_infinity})")]
    NotPersistent { k_infinity: f64 },

    #[error("operation undefined: {0}")]
    Unsupported(String),

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("ill-posed input: {0}")]
    IllPosed(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
}

pub type Result<T> = std::result::Result<T, PinError>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> PinError {
    PinError::InvalidParameter {
        field,
        reason: reason.into(),
    }
}
