use thiserror::Error;

/// Everything that can go wrong in this crate.
///
/// Precision problems are reported, never papered over: any integrality or
/// rank decision that cannot be certified below the working cap surfaces as
/// [`Error::PrecisionLoss`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("precision loss: {0}")]
    PrecisionLoss(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("map is not injective: {0}")]
    NotInjective(String),
    #[error("multi-index component out of range: {0}")]
    ComponentOutOfRange(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("parse error: {0}")]
    ParseError(String),
    #[error("size cap exceeded: {0}")]
    SizeCapExceeded(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precision<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::PrecisionLoss(msg.into()))
}
