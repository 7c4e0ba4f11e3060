use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degree too large: {0}")]
    DegreeTooLarge(String),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    #[error("unbounded: {0}")]
    Unbounded(String),
    #[error("validation failed: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
