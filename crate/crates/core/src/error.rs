use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("not a density matrix: {0}")]
    InvalidState(String),

    #[error("trace preservation violated: max |sum K^dag K - I| = {0:e}")]
    NotTracePreserving(f64),

    #[error("complete positivity violated: min Choi eigenvalue = {0:e}")]
    NotCompletelyPositive(f64),

    #[error("Kraus operator {index} has shape {rows}x{cols}, expected {d_out}x{d_in}")]
    KrausShape {
        index: usize,
        rows: usize,
        cols: usize,
        d_out: usize,
        d_in: usize,
    },

    #[error("malformed channel JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn mismatch(expected: impl ToString, actual: impl ToString) -> Error {
    Error::DimensionMismatch {
        expected: expected.to_string(),
        actual: actual.to_string(),
    }
}
