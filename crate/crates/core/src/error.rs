use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the models, fits and I/O layer.
#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain where a model is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A dataset or input file failed validation.
    #[error("data error: {0}")]
    Data(String),

    /// A numerical procedure failed (non-convergence, singular system).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Malformed configuration or command-line usage.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("config error at line {line}, key `{key}`: {message}")]
    Config { line: usize, key: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
