use std::process::ExitCode;

use confquant_core::Error as CoreError;

/// Everything a command can fail with, mapped onto the process exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Compute(CoreError),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Compute(e)
    }
}

impl CliError {
    /// 1: verification failure, 2: usage or config error, 3: criticality.
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.status())
    }

    pub fn status(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Compute(CoreError::Critical(_)) => 3,
            CliError::Usage(_) | CliError::Config(_) | CliError::Compute(_) | CliError::Io(_) => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
