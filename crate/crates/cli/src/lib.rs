//! Experiment harness over `shiftlab-core`: JSON configs, a built-in corpus,
//! per-command check runners, and persisted reports.

pub mod config;
pub mod corpus;
pub mod report;
pub mod runner;

/// Failures outside individual checks (config parsing, report I/O).
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}
