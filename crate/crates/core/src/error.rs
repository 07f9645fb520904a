use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Requested qubit count exceeds what the state generator allows.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    /// Conditioning on an outcome of (effectively) zero probability.
    #[error("degenerate slice: p(b={b}) = {weight:e} is below the conditioning threshold")]
    DegenerateSlice { b: u64, weight: f64 },

    #[error("insufficient post-selected samples for b={b}: {found} found, {required} required (yield {yield_fraction:.6})")]
    InsufficientSamples {
        b: u64,
        found: u64,
        required: u64,
        yield_fraction: f64,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("format error: {0}")]
    Format(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
