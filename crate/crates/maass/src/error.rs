use core::fmt;
use std::io;
use std::path::PathBuf;

use maass_core::ErrorCategory;

/// Errors of the command-line layer.
#[derive(Debug)]
pub enum CliError {
    /// Malformed flag, config key or value; names the offending token.
    Usage(String),
    /// Error from the numerical core.
    Core(maass_core::Error),
    /// A file could not be read or written.
    Io { path: PathBuf, source: io::Error },
    /// A cache file is not in the expected format.
    Cache {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    /// Cached data do not cover the request.
    MissingData(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable category.
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Core(e) => match e.category() {
                ErrorCategory::Domain => "domain",
                ErrorCategory::Capacity => "capacity",
                ErrorCategory::Numerical => "numerical",
            },
            CliError::Io { .. } | CliError::Cache { .. } | CliError::MissingData(_) => "capacity",
        }
    }

    /// Process exit code: 64 usage, 65 domain, 69 capacity, 70 numerical.
    pub fn exit_code(&self) -> i32 {
        match self.category() {
            "usage" => 64,
            "domain" => 65,
            "capacity" => 69,
            _ => 70,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(s) => write!(f, "usage error: {s}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "io error on {}: {source}", path.display()),
            CliError::Cache { path, line, reason } => {
                write!(f, "bad cache file {} line {line}: {reason}", path.display())
            }
            CliError::MissingData(s) => write!(f, "capacity error: {s}"),
        }
    }
}

impl std::error::Error for CliError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            CliError::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}

impl From<maass_core::Error> for CliError {
    fn from(e: maass_core::Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;
