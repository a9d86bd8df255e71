use std::path::PathBuf;

use nvmsim_core::sim::SimError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown config key `{key}`{}", suggestion.as_ref().map(|s| format!(" (did you mean `{s}`?)")).unwrap_or_default())]
    UnknownKey {
        key: String,
        suggestion: Option<String>,
    },
    #[error("invalid value for `{key}`: {reason}")]
    InvalidValue { key: String, reason: String },
    #[error("{path}: {reason}")]
    ConfigFile { path: PathBuf, reason: String },
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Sim(#[from] SimError),
}

impl CliError {
    /// 1 for a failed simulation invariant, 2 for everything the user can
    /// fix by changing arguments or configuration.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Sim(SimError::Assertion { .. }) => 1,
            _ => 2,
        }
    }
}
