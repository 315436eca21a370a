use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RiskError {
    /// Invalid dimensions, distribution parameters, or engine settings.
    #[error("configuration error: {0}")]
    Config(String),
    /// A caller passed arguments outside an operation's domain.
    #[error("usage error: {0}")]
    Usage(String),
    /// A computed quantity violated an invariant it must satisfy.
    #[error("internal consistency error: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, RiskError>;

pub(crate) fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(RiskError::Config(msg.into()))
}

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(RiskError::Usage(msg.into()))
}
