//! Error types shared across the crate.

use thiserror::Error;

/// Errors from parsing matrix files, table files, or words.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("row {row}, column {col}: {msg}")]
    BadEntry { row: usize, col: usize, msg: String },
    #[error("matrix is not symmetric at ({row},{col}): {a} vs {b}")]
    NotSymmetric { row: usize, col: usize, a: String, b: String },
    #[error("unsupported table version: {0}")]
    Version(String),
    #[error("{0}")]
    Other(String),
}

impl ParseError {
    pub fn other(msg: impl Into<String>) -> Self {
        ParseError::Other(msg.into())
    }
}

/// Errors raised while building a reflection table.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BuildError {
    /// The configured cap on the number of minimal roots was exceeded.
    #[error("root cap exceeded: more than {cap} minimal roots; raise --max-roots")]
    RootCap { cap: usize },
    /// Coefficient arithmetic overflowed the fixed integer width.
    #[error("ring coefficient overflow; rebuild with the `wide` feature for i128 coefficients")]
    Overflow,
    /// An internal invariant failed; the table under construction is not
    /// trustworthy and the build aborts with a diagnostic.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

/// Top-level error for library entry points.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Build(#[from] BuildError),
    /// A memory or iteration cap was exceeded (ball enumeration, growth).
    #[error("resource cap exceeded: {0}")]
    Resource(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
