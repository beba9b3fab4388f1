//! Error type shared by every module of the toolkit.

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter was outside its documented range (bad probability,
    /// mismatched vertex counts, k >= n, ...).
    #[error("parameter error: {0}")]
    Parameter(String),

    /// A point does not lie on the requested space (beyond tolerance).
    #[error("domain error: {0}")]
    Domain(String),

    /// A vertex index was outside [0, n).
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    Index { vertex: usize, n: usize },

    /// I/O failure while reading or writing a file.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed text input (edge list, point cloud, CSV, config).
    #[error("parse error in {path} at line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

impl Error {
    pub fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// Process exit code convention: 2 for parameter/usage errors, 3 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_) | Error::Domain(_) | Error::Index { .. } => 2,
            Error::Io { .. } | Error::Parse { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
