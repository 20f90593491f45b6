use thiserror::Error;

/// Error taxonomy shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degree {degree} exceeds the precomputed range (max {max})")]
    Range { degree: usize, max: usize },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("singular inversion: {0}")]
    SingularInversion(String),

    #[error("ill-conditioned system (condition estimate {condition:e})")]
    Conditioning { condition: f64 },

    #[error("numerical failure: {0}")]
    Numeric(String),
}

impl Error {
    /// Numeric failures as opposed to violated preconditions.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Conditioning { .. } | Error::Numeric(_))
    }

    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
