use thiserror::Error;

/// Errors produced by the auditing and conversion routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet mismatch: {left} symbols vs {right} symbols")]
    AlphabetMismatch { left: usize, right: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid mechanism: {0}")]
    InvalidMechanism(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("mechanism needs at least 2 inputs, got {0}")]
    TooFewInputs(usize),

    #[error("unknown input `{0}`")]
    UnknownInput(String),

    #[error("mixture weights must be nonnegative and sum to 1, got sum {0}")]
    WeightSum(f64),

    #[error("enumeration limit exceeded: {0}")]
    EnumerationLimit(String),

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
