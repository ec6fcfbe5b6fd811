use std::fmt;

/// Failure of a CLI invocation, mapped onto the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or missing inputs (exit 1).
    Usage(String),
    /// Unreadable or malformed input files (exit 2).
    Invalid(String),
    Core(qmn::Error),
    /// A check ran to completion and failed (exit 3).
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::Core(e) if e.is_numeric() => 3,
            CliError::Core(_) => 2,
            CliError::Failed(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Invalid(m) => write!(f, "invalid input: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Failed(m) => write!(f, "check failed: {m}"),
        }
    }
}

impl From<qmn::Error> for CliError {
    fn from(e: qmn::Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
