use super::{gamma, AgingError, AgingParams};
use crate::memory::{Block, Mode, TimingParams, VoltageTable};

/// A stretch of `duration` cycles at a constant stress voltage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoltageSegment {
    pub duration: f64,
    pub voltage: f64,
}

impl VoltageSegment {
    pub fn new(duration: f64, voltage: f64) -> Self {
        Self { duration, voltage }
    }
}

/// Aging accrued per read, per write and per idle cycle by one logic block.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct UnitAging {
    pub read: f64,
    pub write: f64,
    pub idle: f64,
}

/// Weibull scale parameter `α(V) = (A / V^γ) e^{Ea/KT} / Γ(1 + 1/β)`, in cycles.
pub fn scale_parameter(voltage: f64, params: &AgingParams) -> Result<f64, AgingError> {
    if !(voltage > 0.0) {
        return Err(AgingError::NonPositiveVoltage(voltage));
    }
    let lifetime =
        params.material_constant / voltage.powf(params.voltage_exponent) * params.thermal_factor();
    Ok(lifetime / gamma(1.0 + 1.0 / params.weibull_beta))
}

/// MTTF under a constant stress voltage: `α(V) Γ(1 + 1/β)`.
pub fn mttf_constant_voltage(voltage: f64, params: &AgingParams) -> Result<f64, AgingError> {
    Ok(scale_parameter(voltage, params)? * gamma(1.0 + 1.0 / params.weibull_beta))
}

pub fn reliability_from_aging(aging: f64, params: &AgingParams) -> Result<f64, AgingError> {
    if aging < 0.0 || aging.is_nan() {
        return Err(AgingError::NegativeAging(aging));
    }
    Ok((-aging.powf(params.weibull_beta)).exp())
}

/// `Σ duration_i / α(V_i)` over a voltage history.
pub fn piecewise_aging(
    segments: &[VoltageSegment],
    params: &AgingParams,
) -> Result<f64, AgingError> {
    segments.iter().try_fold(0.0, |acc, s| {
        if s.duration < 0.0 {
            return Err(AgingError::InvalidParam {
                name: "duration",
                reason: format!("segment duration must be >= 0, got {}", s.duration),
            });
        }
        Ok(acc + s.duration / scale_parameter(s.voltage, params)?)
    })
}

/// Aging of one stress cycle of `block` in `mode`, or 0 when the block sits
/// below threshold in that mode.
pub(crate) fn per_cycle_aging(
    block: Block,
    mode: Mode,
    voltages: &VoltageTable,
    params: &AgingParams,
) -> Result<f64, AgingError> {
    match params.stress_voltage(voltages.operating(block, mode)) {
        Some(v) => Ok(1.0 / scale_parameter(v, params)?),
        None => Ok(0.0),
    }
}

/// Unit aging of a block: `tRC_r / α(V_r)`, `tRC_w / α(V_w)` and `1 / α(V_idle)`,
/// with the row cycle times taken as whole occupancy cycles.
pub fn compute_unit_aging(
    block: Block,
    timing: &TimingParams,
    voltages: &VoltageTable,
    params: &AgingParams,
) -> Result<UnitAging, AgingError> {
    Ok(UnitAging {
        read: timing.read_cycles() as f64 * per_cycle_aging(block, Mode::Read, voltages, params)?,
        write: timing.write_cycles() as f64
            * per_cycle_aging(block, Mode::Write, voltages, params)?,
        idle: per_cycle_aging(block, Mode::Idle, voltages, params)?,
    })
}

pub fn accumulate_counters(n_read: u64, n_write: u64, n_idle: u64, unit: &UnitAging) -> f64 {
    n_read as f64 * unit.read + n_write as f64 * unit.write + n_idle as f64 * unit.idle
}

/// Series system: the peripheral circuit is as old as its oldest block.
pub fn overall_aging(ps: f64, vr: f64, sa: f64) -> f64 {
    ps.max(vr).max(sa)
}
