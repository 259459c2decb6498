//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the pricing library.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Malformed or inconsistent input data.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A forward rate fell at or below -1/tau, outside the model domain.
    #[error("degenerate forward rate at index {index}: 1 + tau*F = {factor}")]
    DegenerateForward { index: usize, factor: f64 },

    /// Iterative solver failed to reach its tolerance.
    #[error("no convergence after {iterations} sweeps (last update {last_update:e})")]
    NonConvergence { iterations: usize, last_update: f64 },

    /// Correlation matrix is not positive semidefinite.
    #[error("correlation matrix factorization failed at pivot {pivot}")]
    NotPositiveDefinite { pivot: usize },

    /// Evaluation point lies outside the grid domain.
    #[error("point outside grid domain in dimension {dimension}: {value}")]
    OutsideDomain { dimension: usize, value: f64 },

    /// State dimension exceeds the configured full-grid limit.
    #[error("state dimension {dimension} exceeds configured maximum {max}")]
    DimensionLimit { dimension: usize, max: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
