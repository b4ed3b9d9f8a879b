use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    Parameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge on [{lower}, {upper}]: estimate {estimate}, error {error}")]
    Quadrature {
        lower: f64,
        upper: f64,
        estimate: f64,
        error: f64,
    },

    #[error("invalid transform: {0}")]
    InvalidTransform(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Parameter {
            name,
            value,
            reason,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
