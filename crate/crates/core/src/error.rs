use crate::ball::BallError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precision exhausted at {bits} bits: {what}")]
    PrecisionExhausted { what: String, bits: u32 },
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error(transparent)]
    Ball(#[from] BallError),
}
