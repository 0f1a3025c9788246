use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Model(#[from] adjmech::Error),

    #[error("i/o: {0}")]
    Io(String),

    #[error("verification failed")]
    VerificationFailed,
}

impl CliError {
    /// 0 success, 1 failed verification, 2 model-domain error, 64 usage,
    /// 65 insufficient samples, 66 I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 64,
            CliError::Model(adjmech::Error::InsufficientSamples { .. }) => 65,
            CliError::Model(_) => 2,
            CliError::Io(_) => 66,
            CliError::VerificationFailed => 1,
        }
    }
}

impl From<CliError> for ExitCode {
    fn from(e: CliError) -> Self {
        ExitCode::from(e.exit_code())
    }
}
