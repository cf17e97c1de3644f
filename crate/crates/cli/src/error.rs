use qpolar::{QuantumError, SimError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or a malformed job file. Exit code 2.
    #[error("{0}")]
    Usage(String),
    /// The request was well formed but could not be carried out. Exit code 1.
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

impl From<QuantumError> for CliError {
    fn from(e: QuantumError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}
