use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0}")]
    Domain(String),
    #[error("truncation exceeded: {0}")]
    Truncation(String),
    #[error("size cap exceeded: need {needed}, cap {cap}")]
    SizeCap { needed: String, cap: usize },
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
