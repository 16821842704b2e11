use std::fmt;

/// Errors surfaced by the algebra engine.
///
/// Arithmetic between values built for different primes or base modes is a
/// contract violation, not a recoverable condition, and is reported as such
/// rather than silently coercing.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("bidegree window exceeded: {0}")]
    Window(String),

    #[error("truncation overflow: {0}")]
    Truncation(String),

    #[error("parse error at byte {offset}: found {found}, expected {}", expected.join(" | "))]
    Parse {
        offset: usize,
        found: String,
        expected: Vec<String>,
    },

    #[error("module schema: {0}")]
    Schema(String),

    #[error("action Q_{t} is not bidegree-homogeneous at basis element '{name}'")]
    InhomogeneousAction { t: u32, name: String },

    #[error("action Q_{t} does not square to zero (witness: basis element '{name}')")]
    NotSquareZero { t: u32, name: String },

    #[error("module has no action for Q_{0}")]
    MissingAction(u32),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn contract(msg: impl fmt::Display) -> Self {
        Error::Contract(msg.to_string())
    }

    pub fn window(msg: impl fmt::Display) -> Self {
        Error::Window(msg.to_string())
    }

    pub fn truncation(msg: impl fmt::Display) -> Self {
        Error::Truncation(msg.to_string())
    }
}
