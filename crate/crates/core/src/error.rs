use thiserror::Error;

/// Errors raised by model construction, detectors and the Monte-Carlo harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("hypothesis/path mismatch: {0}")]
    HypothesisMismatch(&'static str),

    #[error("too few trials: {trials} trials cannot resolve false-alarm probability {pf}")]
    TooFewTrials { trials: usize, pf: f64 },

    #[error("problem too large for exhaustive enumeration: {0}")]
    TooLarge(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("wrong curve kind: expected {expected}")]
    WrongCurveKind { expected: &'static str },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
