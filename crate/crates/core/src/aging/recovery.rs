use super::AgingError;

/// Aging state of one logic block, split into the part a de-stress can
/// relax and the part that stays.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlockAging {
    pub recoverable: f64,
    pub permanent: f64,
}

impl BlockAging {
    pub fn total(&self) -> f64 {
        self.recoverable + self.permanent
    }

    /// Add fresh stress. Recoverable aging saturates at the policy capacity;
    /// stress beyond it is locked in as permanent shift.
    pub fn accrue(&mut self, delta: f64, policy: &RecoveryPolicy) {
        self.recoverable += delta;
        if self.recoverable > policy.recoverable_capacity {
            self.permanent += self.recoverable - policy.recoverable_capacity;
            self.recoverable = policy.recoverable_capacity;
        }
    }
}

/// How much recoverable aging survives a de-stress, and how much
/// recoverable aging a block can hold before stress turns permanent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryPolicy {
    /// Share of recoverable aging converted to permanent at each de-stress.
    pub kappa: f64,
    /// Recoverable aging ceiling, in aging units. `f64::INFINITY` disables it.
    pub recoverable_capacity: f64,
}

impl RecoveryPolicy {
    pub fn new(kappa: f64, recoverable_capacity: f64) -> Result<Self, AgingError> {
        let p = Self {
            kappa,
            recoverable_capacity,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), AgingError> {
        if !(0.0..=1.0).contains(&self.kappa) {
            return Err(AgingError::InvalidParam {
                name: "kappa",
                reason: format!("must lie in [0, 1], got {}", self.kappa),
            });
        }
        if !(self.recoverable_capacity > 0.0) {
            return Err(AgingError::InvalidParam {
                name: "recoverable_capacity",
                reason: format!("must be > 0, got {}", self.recoverable_capacity),
            });
        }
        Ok(())
    }

    /// Permanent aging left behind by one stress window of `stress` units
    /// that ends in a de-stress.
    pub fn permanent_per_window(&self, stress: f64) -> f64 {
        let mut b = BlockAging::default();
        b.accrue(stress, self);
        apply_destress(b, self).permanent
    }
}

impl Default for RecoveryPolicy {
    fn default() -> Self {
        Self {
            kappa: 0.05,
            recoverable_capacity: 1000.0,
        }
    }
}

/// Relax a block: `kappa` of the recoverable part becomes permanent, the
/// rest recovers.
pub fn apply_destress(block: BlockAging, policy: &RecoveryPolicy) -> BlockAging {
    BlockAging {
        recoverable: 0.0,
        permanent: block.permanent + policy.kappa * block.recoverable,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(r: f64, p: f64) -> BlockAging {
        BlockAging {
            recoverable: r,
            permanent: p,
        }
    }

    fn pol(kappa: f64) -> RecoveryPolicy {
        RecoveryPolicy::new(kappa, f64::INFINITY).unwrap()
    }

    #[test]
    fn destress_linear_rule() {
        assert_eq!(apply_destress(b(10.0, 5.0), &pol(0.0)), b(0.0, 5.0));
        assert_eq!(apply_destress(b(10.0, 5.0), &pol(1.0)), b(0.0, 15.0));
        let r = apply_destress(b(10.0, 5.0), &pol(0.1));
        assert_eq!(r.recoverable, 0.0);
        assert!((r.permanent - 6.0).abs() < 1e-12);
    }

    #[test]
    fn kappa_out_of_range() {
        assert!(RecoveryPolicy::new(1.5, 1.0).is_err());
        assert!(RecoveryPolicy::new(-0.1, 1.0).is_err());
        assert!(RecoveryPolicy::new(0.1, 0.0).is_err());
    }

    #[test]
    fn capacity_overflow_is_permanent() {
        let p = RecoveryPolicy::new(0.05, 100.0).unwrap();
        let mut a = BlockAging::default();
        a.accrue(60.0, &p);
        assert_eq!(a, b(60.0, 0.0));
        a.accrue(70.0, &p);
        assert_eq!(a, b(100.0, 30.0));
        assert!((p.permanent_per_window(130.0) - 35.0).abs() < 1e-12);
        assert!((p.permanent_per_window(50.0) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn destress_never_increases_total() {
        for &k in &[0.0, 0.05, 0.3, 1.0] {
            for &(r, p) in &[(0.0, 0.0), (3.0, 1.0), (1e9, 7.0)] {
                let before = b(r, p);
                let after = apply_destress(before, &pol(k));
                assert!(after.total() <= before.total() + 1e-9 * before.total());
            }
        }
    }
}
