use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("argument outside the domain of {function}: {value}")]
    Domain { function: &'static str, value: f64 },

    #[error("singular evaluation: beads {i} and {j} coincide")]
    Singular { i: usize, j: usize },

    #[error("topology error: {0}")]
    Topology(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
