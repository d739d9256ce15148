use thiserror::Error;

/// Errors raised by the computations in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Inputs outside the domain of the computation (for example `alpha < d`).
    #[error("domain error: {0}")]
    Domain(String),
    /// A root bracket or iteration failed to converge. Valid inputs never hit this.
    #[error("convergence error: {0}")]
    Convergence(String),
    /// The projected work or memory exceeds the configured budget.
    #[error("resource budget exceeded: {what} needs {needed}, budget is {budget}")]
    Resource {
        what: &'static str,
        needed: u128,
        budget: u128,
    },
    /// An input violates an assumption of the check being run.
    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
