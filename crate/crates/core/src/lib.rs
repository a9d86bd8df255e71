//! Cycle-level simulator for PCM-style main memory that tracks BTI aging of
//! the per-bank peripheral circuitry and compares three request schedulers:
//! a periodic de-stress baseline, the aging-threshold LASER scheduler, and
//! Decoupled-LASER, which de-stresses logic blocks independently.
//!
//! The crate is organised bottom-up:
//!
//! * [`aging`]: reliability math, unit aging, recovery and calibration.
//! * [`memory`]: geometry, timing, voltages and per-bank block state.
//! * [`controller`]: request queue, controller tables and the schedulers.
//! * [`workload`]: trace I/O, synthetic generators and the write-cache filter.
//! * [`sim`]: the cycle loop, statistics, MTTF estimation and reports.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aging;
pub mod controller;
pub mod memory;
pub mod sim;
pub mod workload;

pub use aging::{
    AgingError, AgingParams, BaselineProfile, BlockAging, RecoveryPolicy, UnitAging, VoltageSegment,
};
pub use controller::{Policy, SchedulerConfig};
pub use memory::{Block, MemoryGeometry, Mode, TimingParams, VoltageTable};
pub use sim::{run, Mttf, SimConfig, SimError, SimStats};
pub use workload::{GeneratorKind, GeneratorSpec, OpKind, TraceRecord};
