use thiserror::Error;

use crate::conditions::ConditionVerdict;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The request is well-formed but not supported (order cap, dimension, kernel combination).
    #[error("capability error: {0}")]
    Capability(String),

    /// A numerical procedure failed (factorization, overflow, non-convergence).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Input data is unusable (empty sample, too few points, degenerate data).
    #[error("input error: {0}")]
    Input(String),

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    /// The requested model violates its existence condition.
    #[error("condition not satisfied: {}", .0.summary())]
    Divergent(Box<ConditionVerdict>),

    #[error("malformed container: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn capability<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Capability(msg.into()))
}

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

pub(crate) fn check_shape(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Shape { expected, got })
    }
}
