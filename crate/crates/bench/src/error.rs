use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Core(#[from] hankel_core::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("bad file format: {0}")]
    Format(String),

    #[error("invalid experiment: {0}")]
    Spec(String),
}

pub type Result<T> = std::result::Result<T, BenchError>;

pub(crate) fn format_err(msg: impl Into<String>) -> BenchError {
    BenchError::Format(msg.into())
}

pub(crate) fn spec_err(msg: impl Into<String>) -> BenchError {
    BenchError::Spec(msg.into())
}
