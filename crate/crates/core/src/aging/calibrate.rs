use super::model::per_cycle_aging;
use super::{AgingError, AgingParams, RecoveryPolicy};
use crate::memory::{Block, Mode, TimingParams, VoltageTable};

/// Fraction of a de-stress window a block spends in each operating mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeDuty {
    pub read: f64,
    pub write: f64,
    pub idle: f64,
}

/// Steady-state stress pattern of the baseline system: a window of
/// `window_cycles` with the given per-block duty cycles, followed by a
/// de-stress of `destress_cycles`.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineProfile {
    pub window_cycles: f64,
    pub destress_cycles: f64,
    pub duty: [ModeDuty; 3],
}

impl BaselineProfile {
    /// Periodic de-stress every `tdsi` requests with the given read share;
    /// `utilization` is the busy fraction of the window.
    pub fn periodic(
        timing: &TimingParams,
        tdsi: u32,
        read_fraction: f64,
        utilization: f64,
    ) -> Result<Self, AgingError> {
        if !(utilization > 0.0 && utilization <= 1.0) {
            return Err(AgingError::DegenerateProfile(format!(
                "utilization must lie in (0, 1], got {utilization}"
            )));
        }
        if !(0.0..=1.0).contains(&read_fraction) {
            return Err(AgingError::DegenerateProfile(format!(
                "read fraction must lie in [0, 1], got {read_fraction}"
            )));
        }
        if tdsi == 0 {
            return Err(AgingError::DegenerateProfile("tDSI must be >= 1".into()));
        }
        let n = tdsi as f64;
        let read_busy = n * read_fraction * timing.read_cycles() as f64;
        let write_busy = n * (1.0 - read_fraction) * timing.write_cycles() as f64;
        let window = (read_busy + write_busy) / utilization;
        let duty = ModeDuty {
            read: read_busy / window,
            write: write_busy / window,
            idle: 1.0 - (read_busy + write_busy) / window,
        };
        Ok(Self {
            window_cycles: window,
            destress_cycles: timing.destress_cycles() as f64,
            duty: [duty; 3],
        })
    }

    fn validate(&self) -> Result<(), AgingError> {
        if !(self.window_cycles > 0.0) || self.destress_cycles < 0.0 {
            return Err(AgingError::DegenerateProfile(
                "window and de-stress durations must be positive".into(),
            ));
        }
        for (b, d) in Block::ALL.iter().zip(&self.duty) {
            let sum = d.read + d.write + d.idle;
            if d.read < 0.0 || d.write < 0.0 || d.idle < -1e-12 || (sum - 1.0).abs() > 1e-9 {
                return Err(AgingError::DegenerateProfile(format!(
                    "{b} duty cycles must be non-negative and sum to 1"
                )));
            }
        }
        if self.duty.iter().all(|d| d.read + d.write == 0.0) {
            return Err(AgingError::DegenerateProfile(
                "profile serves no requests".into(),
            ));
        }
        Ok(())
    }

    /// Aging accrued by each block over one window.
    pub fn window_stress(
        &self,
        voltages: &VoltageTable,
        params: &AgingParams,
    ) -> Result<[f64; 3], AgingError> {
        let mut out = [0.0; 3];
        for (i, b) in Block::ALL.into_iter().enumerate() {
            let d = &self.duty[i];
            out[i] = self.window_cycles
                * (d.read * per_cycle_aging(b, Mode::Read, voltages, params)?
                    + d.write * per_cycle_aging(b, Mode::Write, voltages, params)?
                    + d.idle * per_cycle_aging(b, Mode::Idle, voltages, params)?);
        }
        Ok(out)
    }

    fn period(&self) -> f64 {
        self.window_cycles + self.destress_cycles
    }
}

/// Solve for the material constant so that the worst block of the profile
/// accrues `failure_aging` of permanent aging after `target_cycles`.
///
/// Stress scales with `1/A`, so the solve is closed form on either side of
/// the recoverable capacity.
pub fn calibrate(
    target_cycles: f64,
    profile: &BaselineProfile,
    params: &AgingParams,
    voltages: &VoltageTable,
    policy: &RecoveryPolicy,
    failure_aging: f64,
) -> Result<AgingParams, AgingError> {
    if !(target_cycles > 0.0) || !(failure_aging > 0.0) {
        return Err(AgingError::DegenerateProfile(
            "target MTTF and failure aging must be positive".into(),
        ));
    }
    profile.validate()?;
    policy.validate()?;
    let unit = params.with_material_constant(1.0);
    let stress_at_unit_a = profile
        .window_stress(voltages, &unit)?
        .into_iter()
        .fold(0.0, f64::max);
    if !(stress_at_unit_a > 0.0) {
        return Err(AgingError::DegenerateProfile(
            "profile accrues no aging".into(),
        ));
    }

    let needed = failure_aging * profile.period() / target_cycles;
    let cap = policy.recoverable_capacity;
    let stress = if policy.kappa > 0.0 && needed <= policy.kappa * cap {
        needed / policy.kappa
    } else if cap.is_finite() {
        needed + (1.0 - policy.kappa) * cap
    } else {
        return Err(AgingError::DegenerateProfile(
            "kappa = 0 without a recoverable capacity never accrues permanent aging".into(),
        ));
    };
    let calibrated = params.with_material_constant(stress_at_unit_a / stress);
    calibrated.validate()?;
    Ok(calibrated)
}

/// MTTF in cycles implied by repeating the profile forever, or infinity
/// when no permanent aging accrues.
pub fn estimate_profile_mttf(
    profile: &BaselineProfile,
    params: &AgingParams,
    voltages: &VoltageTable,
    policy: &RecoveryPolicy,
    failure_aging: f64,
) -> Result<f64, AgingError> {
    profile.validate()?;
    let worst = profile
        .window_stress(voltages, params)?
        .into_iter()
        .fold(0.0, f64::max);
    let per_window = policy.permanent_per_window(worst);
    if per_window <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(failure_aging * profile.period() / per_window)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (TimingParams, VoltageTable, AgingParams) {
        (
            TimingParams::default(),
            VoltageTable::default(),
            AgingParams::default(),
        )
    }

    const YEAR_CYCLES: f64 = 365.25 * 86_400.0 * 1e9;

    #[test]
    fn round_trip_hits_target() {
        let (t, v, p) = setup();
        let prof = BaselineProfile::periodic(&t, 100, 0.5, 1.0).unwrap();
        let pol = RecoveryPolicy::default();
        let cal = calibrate(2.0 * YEAR_CYCLES, &prof, &p, &v, &pol, 2e15).unwrap();
        let m = estimate_profile_mttf(&prof, &cal, &v, &pol, 2e15).unwrap();
        assert!(((m - 2.0 * YEAR_CYCLES) / (2.0 * YEAR_CYCLES)).abs() < 1e-9);
    }

    #[test]
    fn doubling_target_doubles_a_below_capacity() {
        let (t, v, p) = setup();
        let prof = BaselineProfile::periodic(&t, 100, 0.5, 1.0).unwrap();
        let pol = RecoveryPolicy::new(0.05, f64::INFINITY).unwrap();
        let a2 = calibrate(2.0 * YEAR_CYCLES, &prof, &p, &v, &pol, 2e15).unwrap();
        let a4 = calibrate(4.0 * YEAR_CYCLES, &prof, &p, &v, &pol, 2e15).unwrap();
        let r = a4.material_constant / a2.material_constant;
        assert!((r - 2.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_profiles() {
        let (t, v, p) = setup();
        assert!(BaselineProfile::periodic(&t, 100, 0.5, 0.0).is_err());
        let mut prof = BaselineProfile::periodic(&t, 100, 0.5, 1.0).unwrap();
        prof.window_cycles = 0.0;
        let pol = RecoveryPolicy::default();
        assert!(matches!(
            calibrate(1.0, &prof, &p, &v, &pol, 1.0),
            Err(AgingError::DegenerateProfile(_))
        ));
        let idle_only = BaselineProfile {
            window_cycles: 100.0,
            destress_cycles: 10.0,
            duty: [ModeDuty {
                read: 0.0,
                write: 0.0,
                idle: 1.0,
            }; 3],
        };
        assert!(calibrate(1.0, &idle_only, &p, &v, &pol, 1.0).is_err());
        let fully_reversible = RecoveryPolicy::new(0.0, f64::INFINITY).unwrap();
        let prof = BaselineProfile::periodic(&t, 100, 0.5, 1.0).unwrap();
        assert!(calibrate(1.0, &prof, &p, &v, &fully_reversible, 1.0).is_err());
    }

    #[test]
    fn ps_dominates_the_write_heavy_profile() {
        let (t, v, p) = setup();
        let prof = BaselineProfile::periodic(&t, 100, 0.5, 1.0).unwrap();
        let s = prof.window_stress(&v, &p).unwrap();
        assert!(s[0] > s[1] && s[0] > s[2]);
    }
}
