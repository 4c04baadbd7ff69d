use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Invalid parameters supplied to a constructor or generator.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Two paths that must share a grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Input outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
