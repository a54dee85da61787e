use std::fmt;

use nematic_core::Error;

/// CLI failure with a stable code and exit status.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config file or parameter values (exit 2).
    Config(String),
    /// Malformed input file (exit 2).
    Input(String),
    /// The numerics failed (exit 1).
    Numeric(String),
    /// Reading or writing files failed (exit 1).
    Io(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Config(_) => "E_CONFIG",
            CliError::Input(_) => "E_INPUT",
            CliError::Numeric(_) => "E_NUMERIC",
            CliError::Io(_) => "E_IO",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Input(_) => 2,
            CliError::Numeric(_) | CliError::Io(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Input(m) | CliError::Numeric(m) | CliError::Io(m) => m,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // one line, greppable by code
        let msg = self.message().replace('\n', " ");
        write!(f, "error[{}]: {}", self.code(), msg)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams(_)
            | Error::GridTooSmall { .. }
            | Error::InvalidGrid(_)
            | Error::InvalidBranch(_)
            | Error::OddK(_) => CliError::Config(e.to_string()),
            Error::Parse { .. } | Error::GridMismatch(_) | Error::Json(_) => {
                CliError::Input(e.to_string())
            }
            Error::Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
