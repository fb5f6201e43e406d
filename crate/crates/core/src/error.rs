use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation (e.g. `x <= 0` for a real power).
    #[error("domain error: {0}")]
    Domain(String),
    /// Malformed or out-of-range argument (non-positive tolerance, support violation, ...).
    #[error("invalid argument: {0}")]
    Argument(String),
    /// Text could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
    /// The requested quantity is not defined (e.g. a supremum over an empty family).
    #[error("undefined value: {0}")]
    Undefined(String),
    /// `mu({f > t})` is infinite for some `t > 0`.
    #[error("distribution function is infinite at t = {0}")]
    InfiniteLevelSet(String),
    /// A numerical routine failed to bracket or converge.
    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
