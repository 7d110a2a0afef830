use thiserror::Error;

/// Errors raised by the half-space solver and the network simulators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    /// A null space that should be one-dimensional is not.
    #[error("degenerate {what}: singular values {singular_values:?}")]
    Degenerate {
        what: String,
        singular_values: Vec<f64>,
    },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
