use std::process::ExitCode;

use sqg_core::SqgError;
use thiserror::Error;

/// Outcomes other than success, each with a fixed exit status.
#[derive(Debug, Error)]
pub enum Failure {
    #[error("{0}")]
    Check(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Instability(String),
    #[error("{0}")]
    Gate(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Instability(_) => 3,
            Failure::Gate(_) => 4,
            Failure::Io(_) => 2,
        }
    }

    pub fn exit(&self) -> ExitCode {
        ExitCode::from(self.code())
    }
}

impl From<SqgError> for Failure {
    fn from(e: SqgError) -> Self {
        match e {
            SqgError::Instability { .. } => Failure::Instability(e.to_string()),
            SqgError::GateFailed { .. } => Failure::Gate(e.to_string()),
            SqgError::Io(io) => Failure::Io(io),
            other => Failure::Usage(other.to_string()),
        }
    }
}
