use std::path::PathBuf;

use qmod_core::Violation;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid model:\n{}", format_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("{0}")]
    Command(String),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("internal invariant breached: {0}")]
    Invariant(String),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|v| format!("  {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}

impl CliError {
    /// 0 success, 1 parse/validation, 2 command, 3 invariant breach.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Read { .. } | CliError::Parse { .. } | CliError::Invalid(_) => 1,
            CliError::Command(_) | CliError::Write { .. } => 2,
            CliError::Invariant(_) => 3,
        }
    }

    pub(crate) fn command(e: impl std::fmt::Display) -> Self {
        CliError::Command(e.to_string())
    }
}
