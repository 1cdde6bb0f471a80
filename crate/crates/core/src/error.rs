use thiserror::Error;

use crate::format::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch ({context}): expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("subspace of dimension {small} is not contained in subspace of dimension {big}")]
    NotContained { small: usize, big: usize },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("tableau chain has {available} levels but {needed} are required")]
    ChainTooShort { needed: usize, available: usize },

    #[error("relative connections are not compatible: {0}")]
    Incompatible(String),

    /// A structural identity that must hold by construction failed
    /// (for example δ∘δ ≠ 0). Always a bug, never a property of the input.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    pub fn is_invariant_violation(&self) -> bool {
        matches!(self, Error::Invariant(_))
    }
}
