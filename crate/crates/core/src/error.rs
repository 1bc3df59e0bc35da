use thiserror::Error;

/// Errors surfaced by every computation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates an operation's precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A request would exceed a memory or runtime budget.
    #[error("budget exceeded: {what} needs {required}, limit is {limit}")]
    Budget {
        what: &'static str,
        required: u128,
        limit: u128,
    },

    /// A quadrature failed to meet its tolerance.
    #[error("quadrature did not converge: {what} (achieved {achieved:.3e}, wanted {wanted:.3e})")]
    Convergence {
        what: &'static str,
        achieved: f64,
        wanted: f64,
    },

    /// A spectrum cache file is malformed or fails its sum-check.
    #[error("invalid spectrum cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// Short machine-readable tag for the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Precondition(_) => "precondition",
            Error::Budget { .. } => "budget",
            Error::Convergence { .. } => "convergence",
            Error::Cache(_) => "cache",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
