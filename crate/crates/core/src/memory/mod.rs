//! Memory geometry, timing, operating voltages and per-bank peripheral
//! circuit state.

mod bank;
mod geometry;
mod pump;
mod timing;
mod voltage;

pub use bank::{
    Architecture, BankState, BlockPlan, BlockUnits, Counters, InFlight, LogicBlockState,
};
pub use geometry::{DecodedAddress, MemoryGeometry};
pub use pump::{PumpControl, PumpState};
pub use timing::{ReadTiming, TimingParams, WriteTiming};
pub use voltage::{Block, Mode, VoltageTable};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MemoryError {
    #[error("address {addr:#x} exceeds capacity of {capacity} bytes")]
    AddressOutOfRange { addr: u64, capacity: u64 },
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid timing: {0}")]
    InvalidTiming(String),
    #[error("invalid voltage table: {0}")]
    InvalidVoltage(String),
    #[error("unknown logic block `{0}` (expected PS, VR or SA)")]
    UnknownBlock(String),
    #[error("bank {bank} cannot accept {what} at cycle {now}: {reason}")]
    Scheduling {
        bank: usize,
        now: u64,
        what: String,
        reason: String,
    },
    #[error("charge pump row {0} is not available in the coupled architecture")]
    PumpRowNotPermitted(PumpControl),
}
