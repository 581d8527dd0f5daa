use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Operands live in different ambient dimensions or have incompatible degrees.
    #[error("structural mismatch: {0}")]
    Structure(String),

    #[error("degree out of range: {0}")]
    Degree(String),

    /// An input violates an operation's documented precondition.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// An exact identity that must hold did not. The message names the identity.
    #[error("invariant failed: {0}")]
    Invariant(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
