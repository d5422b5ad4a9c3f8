use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("maps are not composable: {0}")]
    NotComposable(String),
    #[error("map is not closed: {0}")]
    NotClosed(String),
    #[error("invalid data: {0}")]
    Invalid(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// A solve that the theory guarantees to succeed came back empty.
    #[error("sign-convention alarm: {0}")]
    Convention(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
