use core::fmt;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input outside the mathematical domain of the operation.
    Domain(&'static str),
    /// Resources (stored coefficients, grid resolution, iteration budget) are insufficient.
    Capacity(&'static str),
    /// A numerical method failed to reach its accuracy target.
    Numerical {
        what: &'static str,
        /// Achieved error or condition estimate.
        estimate: f64,
    },
    /// A search (for example an eigenvalue in a window) found nothing.
    NotFound(&'static str),
    /// The caller broke a documented precondition.
    Contract(&'static str),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Domain,
    Capacity,
    Numerical,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Domain(_) | Error::NotFound(_) | Error::Contract(_) => ErrorCategory::Domain,
            Error::Capacity(_) => ErrorCategory::Capacity,
            Error::Numerical { .. } => ErrorCategory::Numerical,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(s) => write!(f, "domain error: {s}"),
            Error::Capacity(s) => write!(f, "capacity error: {s}"),
            Error::Numerical { what, estimate } => {
                write!(f, "numerical failure: {what} (estimate {estimate:e})")
            }
            Error::NotFound(s) => write!(f, "not found: {s}"),
            Error::Contract(s) => write!(f, "contract violation: {s}"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
