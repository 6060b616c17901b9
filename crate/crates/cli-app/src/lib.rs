//! Config-driven front end: parses a run file, runs one pipeline and writes
//! CSV, PGM and TOML artifacts.

pub mod checks;
pub mod commands;
pub mod config;
pub mod output;

pub use commands::{dispatch, Command, RunSummary};
pub use config::{parse_config, parse_str, RunConfig};

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config key {key}: {reason}")]
    Config { key: String, reason: String },
    #[error("config syntax: {0}")]
    Syntax(String),
    #[error("{}: {reason}", path.display())]
    Io { path: PathBuf, reason: String },
    /// A pipeline stage failed; `stage` names it.
    #[error("stage {stage} failed: {source:#}")]
    Stage { stage: String, source: anyhow::Error },
}

impl CliError {
    /// Process exit code: bad input is a usage error, anything later a failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Syntax(_) => 2,
            CliError::Io { .. } | CliError::Stage { .. } => 1,
        }
    }
}
