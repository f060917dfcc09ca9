//! Runner for the relativistic helicity laboratory: JSON experiment configs,
//! the `verify | link | transport | helicity | drift` commands, CSV output and
//! the plain-text loop format.

pub mod commands;
pub mod config;
pub mod output;
pub mod polyline;

use std::fmt;

pub use commands::{run, Command};
pub use config::{ExperimentConfig, Overrides};

/// Why a command did not succeed.
#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    /// Bad configuration or usage; exit code 2.
    Config(String),
    /// The files could not be written; exit code 2.
    Io(String),
    /// A computation failed part-way; exit code 1.
    Numerical(relhel_core::Error),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "configuration error: {m}"),
            RunError::Io(m) => write!(f, "output error: {m}"),
            RunError::Numerical(e) => write!(f, "computation failed: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<relhel_core::Error> for RunError {
    fn from(e: relhel_core::Error) -> Self {
        RunError::Numerical(e)
    }
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub passed: bool,
    pub files: Vec<std::path::PathBuf>,
    pub lines: Vec<String>,
}

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

/// Process exit code for a command outcome.
pub fn exit_code(r: &Result<Summary, RunError>) -> u8 {
    match r {
        Ok(s) if s.passed => EXIT_PASS,
        Ok(_) | Err(RunError::Numerical(_)) => EXIT_FAIL,
        Err(RunError::Config(_) | RunError::Io(_)) => EXIT_USAGE,
    }
}
