use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("N must be odd and at least 3, got {0}")]
    InvalidN(i64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular input: {0}")]
    Singular(String),
    #[error("pair is not regular: {0}")]
    NotRegular(String),
    #[error("no admissible branch assignment: {0}")]
    NoAdmissibleBranch(String),
    #[error("spectrum condition violated: {0}")]
    Spectrum(String),
    #[error("validation failed at {location}: {message}")]
    Validation { location: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn singular(msg: impl Into<String>) -> Error {
    Error::Singular(msg.into())
}
