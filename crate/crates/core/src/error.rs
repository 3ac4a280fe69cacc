use thiserror::Error;

/// Errors raised by the pricing and rate-function routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of the requested quantity.
    #[error("domain error: {0}")]
    Domain(String),
    /// An iterative solver ran out of iterations or lost its bracket.
    #[error("convergence failure: {0}")]
    Convergence(String),
    /// An asymptotic formula was requested outside the moneyness regime it covers.
    #[error("regime error: {0}")]
    Regime(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn convergence(msg: impl Into<String>) -> Error {
    Error::Convergence(msg.into())
}
