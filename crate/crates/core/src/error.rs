use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed file content. `location` names a byte offset (npy) or a 1-based line (csv, manifest).
    #[error("format error at {location}: {message}")]
    Format { location: String, message: String },

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    #[error("need at least 2 samples in each set for the unbiased statistic (got m={m}, n={n})")]
    InsufficientSamples { m: usize, n: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),

    #[error("unknown label {0:?}")]
    UnknownLabel(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn at_byte(offset: usize, message: impl Into<String>) -> Self {
        Error::Format {
            location: format!("byte {offset}"),
            message: message.into(),
        }
    }

    pub(crate) fn at_line(line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            location: format!("line {line}"),
            message: message.into(),
        }
    }

    /// True when the failure stems from the numerics rather than from the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_))
    }
}
