use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension {0}: must be at least 1")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A bound was evaluated outside the range where it holds.
    #[error("argument outside the valid range: {0}")]
    OutOfRange(String),

    #[error("configuration mismatch: {0}")]
    Mismatch(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("ball {index} has an infinite radius")]
    InfiniteRadius { index: usize },

    #[error("window too small: {0}")]
    WindowTooSmall(String),

    /// An internal invariant was breached (for example the stage cap of the
    /// allocation loop). Never expected on valid input.
    #[error("internal invariant breached: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
