use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::config::ConfigIssue;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NO_INPUT: i32 = 66;
pub const EXIT_CANT_CREATE: i32 = 73;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration:\n{}", format_issues(.0))]
    Config(Vec<ConfigIssue>),
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {}: {1}", .0.display())]
    MissingFile(PathBuf, io::Error),
    #[error("cannot write {}: {1}", .0.display())]
    Write(PathBuf, io::Error),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

fn format_issues(issues: &[ConfigIssue]) -> String {
    issues.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n")
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => EXIT_CONFIG,
            CliError::MissingFile(..) => EXIT_NO_INPUT,
            CliError::Write(..) => EXIT_CANT_CREATE,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<fluctoptics::Error> for CliError {
    fn from(e: fluctoptics::Error) -> Self {
        CliError::Numerical(e.to_string())
    }
}
