use thiserror::Error;

/// Errors produced across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("QR iteration did not converge; unresolved block of size {block}")]
    NoConvergence { block: usize },

    #[error("argument out of range: {0}")]
    Domain(String),

    #[error("numerical range exceeded: {0}")]
    Range(String),

    #[error("ill-conditioned computation: {0}")]
    Conditioning(String),

    #[error("sampling failure: {0}")]
    Sampling(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("statistical failure: {0}")]
    Statistics(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
