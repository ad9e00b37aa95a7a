//! Crate-wide error type.

use std::path::Path;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input is structurally valid but carries no usable signal
    /// (constant image, mask covering the whole field of view, ...).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// An operation that requires at least one element got none.
    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A requested metric has no defined value on this data
    /// (for example a FROC curve over images without ground truth).
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("search pool of {size} pairs exceeds the exhaustive cap of {cap}; use annealing mode")]
    PoolTooLarge { size: usize, cap: usize },

    /// A detector pair was requested from a candidate cache that never ran it.
    #[error("candidate cache miss for pair {0}")]
    CacheMiss(String),

    #[error("synthetic generation failed: {0}")]
    Generation(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {msg}")]
    Image { path: String, msg: String },
}

impl Error {
    /// Wrap an I/O failure with the path it concerned.
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// A malformed line in a text file, reported as `path:line`.
    pub fn parse(path: &Path, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.display().to_string(),
            line,
            msg: msg.into(),
        }
    }
}
