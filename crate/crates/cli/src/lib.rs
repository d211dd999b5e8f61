//! Library half of the `tnnball` command-line tool: input decoding,
//! trajectory export and the verification suites.

pub mod input;
pub mod trajectory;
pub mod verify;

use std::fmt;

/// A command failure, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or unreadable input; exit code 2.
    Usage(String),
    /// A computation failed or a check did not pass; exit code 1.
    Failure(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Failure(m) => write!(f, "error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<tnnball_core::Error> for CliError {
    fn from(e: tnnball_core::Error) -> Self {
        use tnnball_core::Error as E;
        match e {
            E::Parse { .. } | E::Json(_) => CliError::Usage(e.to_string()),
            other => CliError::Failure(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}
