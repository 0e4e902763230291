//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Dimension or shape mismatch between operands.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Invalid parameter value (probabilities, budgets, counts, ...).
    #[error("invalid parameter: {0}")]
    Param(String),

    /// A prompt family was applied to a graph that cannot host it.
    #[error("unsupported prompt: {0}")]
    Unsupported(String),

    /// JSON document violates the expected schema. `path` is a JSON-pointer
    /// style location of the offending field.
    #[error("parse error at {path}: {msg}")]
    Parse { path: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub fn param(msg: impl Into<String>) -> Self {
        Error::Param(msg.into())
    }

    pub fn parse(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            msg: msg.into(),
        }
    }
}
