use std::fmt;
use std::process::ExitCode;

use widthlab::Error;

/// Failure of a command together with its exit status: 1 when a checked
/// claim or bound fails, 2 for invalid input.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn claim(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    pub fn internal(e: impl fmt::Display) -> Self {
        Self {
            code: 1,
            message: e.to_string(),
        }
    }

    pub fn io(e: std::io::Error) -> Self {
        Self::internal(e)
    }

    pub fn csv(e: csv::Error) -> Self {
        Self::internal(e)
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::BoundViolation { .. } | Error::Infeasible | Error::HypothesisViolated(_) => Self::claim(e.to_string()),
            other => Self::usage(other.to_string()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}
