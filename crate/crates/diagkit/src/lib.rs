//! File formats and the command-line front end for `diagkit-core`.

pub mod cli;
pub mod json;
pub mod report;

use diagkit_core::Error;

/// Failures surfaced by the command line, each with its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("bad input: {0}")]
    Input(String),
    #[error("{0}")]
    Core(#[from] Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_CERTIFICATE: i32 = 4;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::Infeasible(_)) => EXIT_INFEASIBLE,
            CliError::Core(Error::Precondition { .. }) => EXIT_CERTIFICATE,
            _ => EXIT_USAGE,
        }
    }
}
