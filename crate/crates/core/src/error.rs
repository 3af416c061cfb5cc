use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The first-order observation model produced a value outside [0, 1].
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("undefined estimate: {0}")]
    UndefinedEstimate(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
