use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by every numerical routine in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian: deviation {deviation:e} exceeds tolerance {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("eigenvalue iteration did not converge after {iterations} iterations ({} of {} eigenvalues found)", found.len(), dim)]
    Convergence {
        iterations: usize,
        dim: usize,
        found: Vec<Complex64>,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sample {index}: {source}")]
    Sample {
        index: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("growth-rate fit needs at least 3 finite moments, got {0}")]
    TooFewPoints(usize),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
