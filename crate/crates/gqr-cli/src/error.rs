//! Error categories mapped to process exit codes.

use gqr_core::CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration: unknown keys, missing values, violated constraints.
    #[error("{0}")]
    Config(String),
    /// Numerical failure inside an otherwise valid run.
    #[error("{0}")]
    Numerical(String),
    /// Filesystem failure writing artifacts.
    #[error("{0}")]
    Io(String),
}

/// Exit codes: config errors 2, numerical errors 3, I/O errors 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    Config = 2,
    Numerical = 3,
    Io = 4,
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::Config,
            CliError::Numerical(_) => ExitCode::Numerical,
            CliError::Io(_) => ExitCode::Io,
        }
    }

    pub fn category(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Numerical(_) => "numerical",
            CliError::Io(_) => "io",
        }
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        match err {
            CoreError::Config(msg) => CliError::Config(msg),
            CoreError::Singularity(msg) | CoreError::Integration(msg) => CliError::Numerical(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err.to_string())
    }
}
