use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("width mismatch: expected {expected}, found {found}")]
    WidthMismatch { expected: usize, found: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("index {index} out of range 1..={n}")]
    OutOfRange { index: usize, n: usize },

    #[error("instance has {n} variables, exceeding the enumeration limit {limit}")]
    SizeLimit { n: usize, limit: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty set")]
    Empty,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
