use std::fmt;
use std::process::ExitCode;

use dualsys_core::Error as CoreError;

/// Failure of a subcommand, carrying its exit status.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or inconsistent configuration (exit 2).
    Config(String),
    /// The capture table could not be read (exit 3).
    Data(CoreError),
    /// Numerical failure or output I/O failure (exit 4).
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::Data(_) => ExitCode::from(3),
            CliError::Runtime(_) => ExitCode::from(4),
        }
    }

    pub fn io(what: &str, err: std::io::Error) -> Self {
        CliError::Runtime(format!("{what}: {err}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Data(err) => write!(f, "data error: {err}"),
            CliError::Runtime(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        match err {
            CoreError::Usage(msg) => CliError::Config(msg),
            e @ (CoreError::Ingestion { .. } | CoreError::Io { .. }) => CliError::Data(e),
            e => CliError::Runtime(e.to_string()),
        }
    }
}
