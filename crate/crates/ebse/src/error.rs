//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by model construction, gain design, certification, and
/// simulation.
#[derive(Debug, Error)]
pub enum Error {
    /// Operand dimensions do not match the model.
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        actual: String,
    },

    /// A matrix that must be stable (spectral radius < 1) is not.
    #[error("{0}")]
    Unstable(String),

    /// An iterative solver did not converge.
    #[error("{what} did not converge after {iterations} iterations")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
    },

    /// Invalid or inconsistent scenario/configuration data.
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    /// A certification request that is computationally refused.
    #[error("{0}")]
    Refused(String),

    /// File or serialization failure.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Scenario file parse failure.
    #[error("scenario parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
