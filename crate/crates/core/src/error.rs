//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Precondition violation by the caller (bad counts, empty windows, ...).
    #[error("usage error: {0}")]
    Usage(String),

    /// A query left the region where the description is certified.
    #[error("horizon exceeded: {0}")]
    HorizonExceeded(String),

    /// Explicit subset queried outside its declared universe.
    #[error("universe exceeded: {0}")]
    UniverseExceeded(String),

    /// A configured hard cap (window size, tuple arity, ...) was hit.
    #[error("cap exceeded: {0}")]
    CapExceeded(String),

    /// Integer overflow while evaluating a block rule.
    #[error("block rule overflow: {0}")]
    Overflow(String),

    /// Operation not defined for this system/window shape combination.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// DSL syntax error with byte position and expectation.
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// classify_system called on a system that is not transitive.
    #[error("dichotomy requires transitivity")]
    RequiresTransitivity,

    /// Measure inconsistent with the system it is placed on.
    #[error("measure/system mismatch: {0}")]
    MeasureMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    /// Machine-readable code used by the CLI and the FFI layer.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Usage(_) => "usage",
            Error::HorizonExceeded(_) => "horizon",
            Error::UniverseExceeded(_) => "universe",
            Error::CapExceeded(_) => "cap",
            Error::Overflow(_) => "overflow",
            Error::Unsupported(_) => "unsupported",
            Error::Parse { .. } => "parse",
            Error::RequiresTransitivity => "transitivity",
            Error::MeasureMismatch(_) => "measure",
        }
    }
}
