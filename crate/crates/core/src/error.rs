use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of a mathematical function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A caller asked for something that makes no sense (empty input,
    /// degenerate grid, inverted bounds).
    #[error("usage error: {0}")]
    Usage(String),

    /// A computation produced no usable number (all-zero or NaN weights).
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// The capture table file could not be turned into a valid table.
    #[error("ingestion error at row {row}: {message}")]
    Ingestion { row: usize, message: String },

    #[error("could not read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A likelihood evaluator failed for one candidate count.
    #[error("evaluation failed at n = {n}: {source}")]
    Evaluation {
        n: u64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub(crate) fn ingestion(row: usize, msg: impl Into<String>) -> Self {
        Error::Ingestion {
            row,
            message: msg.into(),
        }
    }
}
