use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("invalid input: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, StatsError>;

pub(crate) fn domain(msg: impl Into<String>) -> StatsError {
    StatsError::Domain(msg.into())
}
