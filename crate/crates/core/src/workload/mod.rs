//! Request traces: the text format, synthetic generators and the
//! write-cache filter.

mod filter;
mod generator;
mod trace;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

pub use filter::write_cache_filter;
pub use generator::{generate, GeneratorKind, GeneratorSpec, InterArrival, Phase};
pub use trace::{parse_trace, read_trace, write_trace, write_trace_file};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpKind {
    Read,
    Write,
}

impl OpKind {
    pub fn is_write(self) -> bool {
        self == OpKind::Write
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OpKind::Read => "R",
            OpKind::Write => "W",
        })
    }
}

impl FromStr for OpKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "R" | "r" => Ok(OpKind::Read),
            "W" | "w" => Ok(OpKind::Write),
            other => Err(format!("expected R or W, got {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TraceRecord {
    pub arrival_cycle: u64,
    pub address: u64,
    pub kind: OpKind,
}

impl TraceRecord {
    pub fn new(arrival_cycle: u64, kind: OpKind, address: u64) -> Self {
        Self {
            arrival_cycle,
            address,
            kind,
        }
    }
}

#[derive(Debug, Error)]
pub enum WorkloadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("I/O error: {0}")]
    Stream(#[from] std::io::Error),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("line {line}: arrival cycle {cycle} is before the previous record ({previous})")]
    Unordered {
        line: usize,
        cycle: u64,
        previous: u64,
    },
    #[error("invalid workload spec: {0}")]
    InvalidSpec(String),
}
