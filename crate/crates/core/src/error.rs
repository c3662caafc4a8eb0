//! Error type shared by all modules.

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed quantum numbers (wrong half-integer parity, |m| > j, ...).
    #[error("invalid quantum number: {0}")]
    QuantumNumber(String),
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Incompatible matrix or vector dimensions.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// A state failed its Hermiticity/trace/positivity/norm checks.
    #[error("state validation failed: {0}")]
    Validation(String),
    /// Operation not supported for the requested configuration.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// Malformed input file.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
