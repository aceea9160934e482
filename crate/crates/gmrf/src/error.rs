//! Error type shared by all estimation and simulation routines.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A structurally invalid argument: bad dimension, index out of range,
    /// mismatched shapes, malformed options.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Too few observation rows for the requested operation.
    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    /// A block-sample covariance matrix could not be inverted and shrinkage
    /// was disabled.
    #[error("singular block-sample covariance at column {column}")]
    SingularBlock { column: usize },

    /// A matrix required to be symmetric positive definite is not.
    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    /// Conditional expectation requested at a vertex with zero precision.
    #[error("degenerate conditional at vertex {vertex}: zero diagonal entry")]
    DegenerateConditional { vertex: usize },

    /// Autoregressive coefficients outside the stationary region.
    #[error("non-stationary autoregressive coefficients: {0}")]
    NonStationary(String),

    /// A numerical procedure failed (singular linear system, failed
    /// factorization of a population matrix).
    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed input file (CSV dataset or Matrix Market matrix).
    #[error("parse error: {0}")]
    Parse(String),
}
