use thiserror::Error;

/// Errors raised while building or evaluating circuits.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum IfmError {
    /// The circuit, state or flag combination is malformed.
    #[error("configuration error: {0}")]
    Config(String),
    /// A numeric parameter lies outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),
}

impl IfmError {
    pub fn config(msg: impl Into<String>) -> Self {
        IfmError::Config(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        IfmError::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, IfmError>;
