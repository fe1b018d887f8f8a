use thiserror::Error;

/// Errors raised by constructors, generators and file readers.
///
/// Build failures of the Hamilton cycle construction are not errors in this
/// sense; they are reported through [`crate::builder::BuildFailure`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point out of domain: coordinate {value} on axis {axis} is outside [0, 1]")]
    OutOfDomain { axis: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("graph too large for the exact oracle: n = {n} exceeds limit {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: msg.into(),
    }
}
