//! Experiment runner and report writers behind the `msqi` binary.

pub mod config;
pub mod experiments;
pub mod fit;

use msqi::ErrorKind;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] msqi::Error),

    #[error("configuration: {0}")]
    Config(String),

    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV output: {0}")]
    Csv(#[from] csv::Error),

    #[error("I/O: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit status: 2 for bad input, 3 for violated preconditions, 4 for internal failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => match e.kind() {
                ErrorKind::Input => 2,
                ErrorKind::Precondition => 3,
                ErrorKind::Internal => 4,
            },
            CliError::Config(_) | CliError::Json(_) | CliError::Io(_) => 2,
            CliError::Csv(_) => 4,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

/// Scientific notation with the shortest round-trip mantissa.
pub(crate) fn fmt_num(v: f64) -> String {
    format!("{v:e}")
}
