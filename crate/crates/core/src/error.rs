use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of a function (negative radius, zero spacing, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("{path}: line {line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// The shared patch matrix could not be factorized.
    #[error(
        "interpolation matrix is numerically singular for {kernel} kernel with alpha = {alpha}"
    )]
    SingularMatrix { kernel: String, alpha: f64 },

    #[error("index ({row}, {col}) out of range for a {ny}x{nx} grid")]
    OutOfRange {
        row: usize,
        col: usize,
        nx: usize,
        ny: usize,
    },

    #[error("unknown {what} '{given}', expected one of: {expected}")]
    UnknownName {
        what: &'static str,
        given: String,
        expected: String,
    },

    #[error("inconsistent inputs: {0}")]
    Mismatch(String),

    #[error("cannot start worker threads: {0}")]
    Threads(String),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::SingularMatrix { .. })
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
