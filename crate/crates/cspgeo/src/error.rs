use thiserror::Error;

/// Error type shared by every operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument violates a precondition.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// An explicit budget (state count, memory, iteration cap) would be
    /// exceeded. Budgets are never silently relaxed.
    #[error("resource budget exceeded: {0}")]
    Resource(String),

    /// A numeric routine failed to converge or left its domain.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// The requested quantity is undefined for this input
    /// (e.g. inter-cluster distance of a single cluster).
    #[error("undefined result: {0}")]
    Undefined(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub fn undefined(msg: impl Into<String>) -> Self {
        Error::Undefined(msg.into())
    }
}
