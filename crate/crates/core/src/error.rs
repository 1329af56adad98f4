use thiserror::Error;

/// Errors raised by the model, solvers and file handling.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid product: {0}")]
    InvalidProduct(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid assortment: {0}")]
    InvalidAssortment(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
