//! BTI aging model.
//!
//! Aging of a logic block is the dimensionless sum `Σ Δt / α(V)` over the
//! voltage history of the block, where `α` is the Weibull scale parameter at
//! the stress voltage. Reliability follows as `exp(-aging^β)`. Because the
//! sum is order independent, the controller can track it with per-block
//! read/write/idle counters and precomputed unit aging values.

mod calibrate;
mod gamma;
mod model;
mod params;
mod recovery;

pub use calibrate::{calibrate, estimate_profile_mttf, BaselineProfile, ModeDuty};
pub use gamma::gamma;
pub use model::{
    accumulate_counters, compute_unit_aging, mttf_constant_voltage, overall_aging, piecewise_aging,
    reliability_from_aging, scale_parameter, UnitAging, VoltageSegment,
};
pub use params::{AgingParams, BOLTZMANN_EV_PER_K};
pub use recovery::{apply_destress, BlockAging, RecoveryPolicy};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AgingError {
    #[error("voltage must be positive, got {0} V")]
    NonPositiveVoltage(f64),
    #[error("aging must be non-negative, got {0}")]
    NegativeAging(f64),
    #[error("invalid aging parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },
    #[error("degenerate calibration profile: {0}")]
    DegenerateProfile(String),
}
