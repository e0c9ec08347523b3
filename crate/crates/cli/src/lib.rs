//! Experiment harness behind the `rgmm` binary: dataset I/O, benchmark
//! campaigns, the mixing-coefficient sensitivity sweep, and separation
//! reports, all seeded and reproducible byte for byte.

pub mod bench;
pub mod config;
pub mod io;

use thiserror::Error;

/// Process-level error split: validation problems exit 1, I/O problems
/// exit 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io(_) => 2,
        }
    }
}

impl From<rgmm::Error> for CliError {
    fn from(e: rgmm::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
