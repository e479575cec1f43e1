use thiserror::Error;

/// Errors raised by the simulator and its configuration layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("resource error: {0}")]
    Resource(String),

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("configuration error in `{key}`: {reason}")]
    Config { key: String, reason: String },
}

impl SimError {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        SimError::Parameter {
            name,
            reason: reason.into(),
        }
    }
}
