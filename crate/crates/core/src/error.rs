use thiserror::Error;

/// Failure modes shared by every evaluator in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function being evaluated.
    #[error("domain error: {0}")]
    Domain(String),
    /// An iterative method exhausted its budget before meeting its tolerance.
    #[error("convergence failure: {0}")]
    Convergence(String),
    /// A structural hypothesis (convexity, limit behaviour, positivity) failed its spot-check.
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    /// A log-space accumulator left the representable double range.
    #[error("overflow: {0}")]
    Overflow(String),
    /// Two routes to the same quantity disagreed beyond their tolerance.
    #[error("inconsistent evaluation: {0}")]
    Inconsistent(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
