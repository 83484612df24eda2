//! Command-line front end for the potential-theory engine: scene loading
//! and generation, subcommand implementations, and SVG figure emission.
//! The binary in `main.rs` is a thin wrapper around [`commands::run`].

pub mod commands;
pub mod scenes;
pub mod svg;

use std::fmt;

/// Errors split by exit code: usage and I/O problems exit 2, failed
/// computations and failed verification checks exit 1.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, unreadable or malformed input files.
    Usage(String),
    /// A computation error or a verification suite with failing checks.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Failed(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<potlab_core::Error> for CliError {
    fn from(e: potlab_core::Error) -> CliError {
        CliError::Failed(e.to_string())
    }
}
