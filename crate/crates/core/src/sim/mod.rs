//! The cycle loop, its configuration, statistics and reports.

mod engine;
mod report;
mod stats;

use std::path::PathBuf;
use std::sync::Arc;

use thiserror::Error;

pub use engine::{run, run_trace};
pub use report::{emit_report, parse_report, ReportFormat, ReportRow, REPORT_COLUMNS};
pub use stats::{
    destress_overhead, estimate_mttf, AgingSample, BankStats, BlockStats, Mttf, SimStats,
    WaitStats, CYCLES_PER_YEAR_NS,
};

use crate::aging::{AgingError, AgingParams, RecoveryPolicy};
use crate::controller::{ControllerError, SchedulerConfig};
use crate::memory::{MemoryError, MemoryGeometry, TimingParams, VoltageTable};
use crate::workload::{GeneratorSpec, TraceRecord, WorkloadError};

#[derive(Debug, Clone, PartialEq)]
pub enum Workload {
    Generated(GeneratorSpec),
    TraceFile(PathBuf),
    Records {
        label: String,
        records: Arc<Vec<TraceRecord>>,
    },
}

impl Workload {
    pub fn label(&self) -> String {
        match self {
            Workload::Generated(g) => g.kind.name().to_string(),
            Workload::TraceFile(p) => p
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| p.display().to_string()),
            Workload::Records { label, .. } => label.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub geometry: MemoryGeometry,
    pub timing: TimingParams,
    pub voltages: VoltageTable,
    pub aging: AgingParams,
    pub recovery: RecoveryPolicy,
    /// Permanent aging at which a block is considered failed.
    pub failure_aging: f64,
    pub scheduler: SchedulerConfig,
    pub workload: Workload,
    /// Overrides the workload label in reports.
    pub workload_label: Option<String>,
    /// Fraction of requests absorbed by the write cache.
    pub write_cache_hit_rate: f64,
    pub write_cache_seed: u64,
    /// Stop after this many cycles even if the trace has not drained.
    pub max_cycles: Option<u64>,
    pub sample_interval: u64,
    pub record_timeline: bool,
    pub record_actions: bool,
    /// Check controller invariants every cycle.
    pub check_invariants: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            geometry: MemoryGeometry::default(),
            timing: TimingParams::default(),
            voltages: VoltageTable::default(),
            aging: AgingParams::default(),
            recovery: RecoveryPolicy::default(),
            failure_aging: Self::DEFAULT_FAILURE_AGING,
            scheduler: SchedulerConfig::default(),
            workload: Workload::Generated(GeneratorSpec::default()),
            workload_label: None,
            write_cache_hit_rate: 0.0,
            write_cache_seed: 0,
            max_cycles: None,
            sample_interval: 10_000,
            record_timeline: false,
            record_actions: false,
            check_invariants: true,
        }
    }
}

impl SimConfig {
    pub const DEFAULT_FAILURE_AGING: f64 = 2e15;

    pub fn validate(&self) -> Result<(), SimError> {
        self.geometry.validate()?;
        self.timing.validate()?;
        self.aging.validate()?;
        self.voltages.validate(self.aging.vth)?;
        self.recovery.validate()?;
        self.scheduler.validate()?;
        if !(self.failure_aging > 0.0 && self.failure_aging.is_finite()) {
            return Err(SimError::Config(format!(
                "failure_aging must be finite and > 0, got {}",
                self.failure_aging
            )));
        }
        if !(0.0..=1.0).contains(&self.write_cache_hit_rate) {
            return Err(SimError::Config(format!(
                "write cache hit rate must be in [0, 1], got {}",
                self.write_cache_hit_rate
            )));
        }
        if self.sample_interval == 0 {
            return Err(SimError::Config("sample_interval must be >= 1".into()));
        }
        if let Workload::Generated(g) = &self.workload {
            g.validate()?;
            if g.capacity_bytes > self.geometry.capacity_bytes {
                return Err(SimError::Config(format!(
                    "workload addresses span {} bytes but memory holds {}",
                    g.capacity_bytes, self.geometry.capacity_bytes
                )));
            }
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        self.workload_label
            .clone()
            .unwrap_or_else(|| self.workload.label())
    }
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Aging(#[from] AgingError),
    #[error(transparent)]
    Memory(#[from] MemoryError),
    #[error(transparent)]
    Controller(#[from] ControllerError),
    #[error(transparent)]
    Workload(#[from] WorkloadError),
    #[error("invariant violated at cycle {cycle}: {message}")]
    Assertion { cycle: u64, message: String },
    #[error("{0} is undefined for a run with no activity")]
    Undefined(&'static str),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("report error: {0}")]
    Report(String),
}
