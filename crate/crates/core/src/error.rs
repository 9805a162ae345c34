use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A caller supplied arguments outside an operation's contract.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },

    /// A provably-true identity failed at runtime; always a bug.
    #[error("internal consistency violated: {0}")]
    InternalConsistency(String),

    #[error("inversion unsupported: {0}")]
    InversionUnsupported(String),

    #[error("pole at evaluation point")]
    Pole,

    #[error("n = {n} exceeds the exact-mode ceiling {ceiling}; use series mode")]
    UseSeriesMode { n: usize, ceiling: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
