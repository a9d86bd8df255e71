use crate::aging::UnitAging;
use crate::memory::{Architecture, BankState, Block, BlockUnits};

/// One availability bit per bank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatusTable {
    bits: Vec<bool>,
}

impl StatusTable {
    pub fn new(banks: usize) -> Self {
        Self {
            bits: vec![true; banks],
        }
    }

    pub fn refresh(&mut self, banks: &[BankState], now: u64, arch: Architecture) {
        for (bit, bank) in self.bits.iter_mut().zip(banks) {
            *bit =
                !bank.is_busy(now) && (arch == Architecture::Decoupled || !bank.any_destressing());
        }
    }

    pub fn available(&self, bank: usize) -> bool {
        self.bits[bank]
    }

    pub fn bits(&self) -> usize {
        self.bits.len()
    }
}

/// A 32-bit unsigned mantissa with an implied binary exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FixedPoint {
    pub mantissa: u32,
    pub shift: i32,
}

impl FixedPoint {
    pub const BITS: usize = 32;

    pub fn quantize(x: f64) -> Self {
        if !(x > 0.0) {
            return Self::default();
        }
        let mut shift = x.log2().floor() as i32 - 31;
        let mut m = (x / 2f64.powi(shift)).round();
        if m >= 4_294_967_296.0 {
            shift += 1;
            m = (x / 2f64.powi(shift)).round();
        }
        Self {
            mantissa: m as u32,
            shift,
        }
    }

    pub fn value(self) -> f64 {
        self.mantissa as f64 * 2f64.powi(self.shift)
    }
}

/// Unit aging constants held by the controller, one row per block class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitAgingTable {
    /// `[read, write, idle]` per row.
    pub rows: Vec<[FixedPoint; 3]>,
}

impl UnitAgingTable {
    pub fn new(units: &BlockUnits, arch: Architecture) -> Self {
        let q = |u: &UnitAging| {
            [
                FixedPoint::quantize(u.read),
                FixedPoint::quantize(u.write),
                FixedPoint::quantize(u.idle),
            ]
        };
        let rows = match arch {
            Architecture::Coupled => {
                let max = |f: fn(&UnitAging) -> f64| units.unit.iter().map(f).fold(0.0, f64::max);
                vec![q(&UnitAging {
                    read: max(|u| u.read),
                    write: max(|u| u.write),
                    idle: max(|u| u.idle),
                })]
            }
            Architecture::Decoupled => Block::ALL
                .iter()
                .map(|b| q(&units.unit[b.index()]))
                .collect(),
        };
        Self { rows }
    }

    pub fn unit(&self, row: usize) -> UnitAging {
        let [r, w, i] = self.rows[row];
        UnitAging {
            read: r.value(),
            write: w.value(),
            idle: i.value(),
        }
    }

    pub fn bits(&self) -> usize {
        self.rows.len() * 3 * FixedPoint::BITS
    }
}

/// Per-bank (per block when decoupled) access counter widths.
pub const IDLE_COUNTER_BITS: usize = 16;
pub const REQUEST_COUNTER_BITS: usize = 4;
pub const ACCESS_ENTRY_BITS: usize = IDLE_COUNTER_BITS + 2 * REQUEST_COUNTER_BITS;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StorageAudit {
    pub status_bits: usize,
    pub access_bits: usize,
    pub unit_bits: usize,
}

impl StorageAudit {
    pub fn new(banks: usize, arch: Architecture) -> Self {
        let (entries, unit_rows) = match arch {
            Architecture::Coupled => (banks, 1),
            Architecture::Decoupled => (banks * 3, 3),
        };
        Self {
            status_bits: banks,
            access_bits: entries * ACCESS_ENTRY_BITS,
            unit_bits: unit_rows * 3 * FixedPoint::BITS,
        }
    }

    pub fn total_bits(&self) -> usize {
        self.status_bits + self.access_bits + self.unit_bits
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aging::{AgingParams, RecoveryPolicy};
    use crate::memory::{TimingParams, VoltageTable};

    #[test]
    fn storage_for_128_banks() {
        assert_eq!(
            StorageAudit::new(128, Architecture::Coupled).total_bits(),
            3296
        );
        assert_eq!(
            StorageAudit::new(128, Architecture::Decoupled).total_bits(),
            9632
        );
    }

    #[test]
    fn quantization_error_bound() {
        for x in [1e-30, 3.3e-9, 0.1, 1.0, 28.123456789, 1e12, 4294967295.7] {
            let q = FixedPoint::quantize(x);
            assert!(((q.value() - x) / x).abs() <= 2f64.powi(-20), "{x}");
        }
        assert_eq!(FixedPoint::quantize(0.0).value(), 0.0);
    }

    #[test]
    fn table_matches_units() {
        let units = BlockUnits::new(
            &TimingParams::default(),
            &VoltageTable::default(),
            &AgingParams::default(),
            RecoveryPolicy::default(),
        )
        .unwrap();
        let t = UnitAgingTable::new(&units, Architecture::Decoupled);
        assert_eq!(t.bits(), 9 * 32);
        for b in Block::ALL {
            let (q, u) = (t.unit(b.index()), units.unit[b.index()]);
            for (a, e) in [(q.read, u.read), (q.write, u.write), (q.idle, u.idle)] {
                assert!(e == 0.0 && a == 0.0 || ((a - e) / e).abs() <= 2f64.powi(-20));
            }
        }
        assert_eq!(
            UnitAgingTable::new(&units, Architecture::Coupled).bits(),
            96
        );
    }

    #[test]
    fn status_reflects_bank_occupancy() {
        let mut banks = vec![BankState::new(0, false), BankState::new(1, false)];
        banks[1].busy_until = 10;
        let mut s = StatusTable::new(2);
        s.refresh(&banks, 5, Architecture::Coupled);
        assert!(s.available(0));
        assert!(!s.available(1));
        s.refresh(&banks, 10, Architecture::Coupled);
        assert!(s.available(1));
    }
}
