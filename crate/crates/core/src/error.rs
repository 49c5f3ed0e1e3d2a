use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("size error: {0}")]
    Size(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unsupported case: {0}")]
    Unsupported(String),

    #[error("polynomial is not homogeneous: found degrees {first} and {second}")]
    Inhomogeneous { first: usize, second: usize },

    #[error("invalid value for --{flag}: {message}")]
    Validation { flag: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn size(msg: impl Into<String>) -> Self {
        Error::Size(msg.into())
    }
}
