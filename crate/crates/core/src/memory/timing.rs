use super::MemoryError;

/// Read timing in ns. Only `trc` drives occupancy; the sub-phases are kept
/// for reference because they overlap in ways the totals do not spell out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadTiming {
    pub trcd: f64,
    pub tras: f64,
    pub trp: f64,
    pub trc: f64,
}

/// Write timing in ns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WriteTiming {
    pub trcd: f64,
    pub tburst: f64,
    pub twr: f64,
    pub trp: f64,
    pub trc: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingParams {
    pub read: ReadTiming,
    pub write: WriteTiming,
    /// Memory controller clock period.
    pub clock_ns: f64,
    /// De-stress cycle time, in de-stress cycles.
    pub tdsc: u32,
    /// Length of one de-stress cycle. Defaults to the mean of the read and
    /// write row cycle times, so `tDSC / tDSI` is the throughput loss of
    /// periodic de-stress on an even read/write mix.
    pub destress_cycle_ns: f64,
    /// Verify step at the tail of a write; a write whose verify is deferred
    /// runs `trc - verify_ns` of program first.
    pub verify_ns: f64,
}

impl Default for TimingParams {
    fn default() -> Self {
        Self {
            read: ReadTiming {
                trcd: 3.75,
                tras: 55.25,
                trp: 1.0,
                trc: 56.25,
            },
            write: WriteTiming {
                trcd: 75.0,
                tburst: 15.0,
                twr: 190.0,
                trp: 1.0,
                trc: 209.75,
            },
            clock_ns: 1.0,
            tdsc: 10,
            destress_cycle_ns: 133.0,
            verify_ns: 20.0,
        }
    }
}

fn to_cycles(ns: f64, clock: f64) -> u64 {
    // Guard against 56.25 / 0.25 style results landing a hair above an integer.
    let c = ns / clock;
    let r = c.round();
    if (c - r).abs() < 1e-9 {
        r as u64
    } else {
        c.ceil() as u64
    }
}

impl TimingParams {
    pub fn read_cycles(&self) -> u64 {
        to_cycles(self.read.trc, self.clock_ns)
    }

    pub fn write_cycles(&self) -> u64 {
        to_cycles(self.write.trc, self.clock_ns)
    }

    pub fn verify_cycles(&self) -> u64 {
        to_cycles(self.verify_ns, self.clock_ns)
    }

    /// Program-only part of a write.
    pub fn program_cycles(&self) -> u64 {
        self.write_cycles() - self.verify_cycles()
    }

    pub fn destress_cycles(&self) -> u64 {
        to_cycles(self.tdsc as f64 * self.destress_cycle_ns, self.clock_ns)
    }

    pub fn access_cycles(&self, write: bool) -> u64 {
        if write {
            self.write_cycles()
        } else {
            self.read_cycles()
        }
    }

    pub fn validate(&self) -> Result<(), MemoryError> {
        let all = [
            ("clock_ns", self.clock_ns),
            ("read.trc", self.read.trc),
            ("write.trc", self.write.trc),
            ("destress_cycle_ns", self.destress_cycle_ns),
        ];
        for (name, v) in all {
            if !(v.is_finite() && v > 0.0) {
                return Err(MemoryError::InvalidTiming(format!(
                    "{name} must be > 0, got {v}"
                )));
            }
        }
        let phases = [
            ("read.trcd", self.read.trcd, self.read.trc),
            ("read.tras", self.read.tras, self.read.trc),
            ("read.trp", self.read.trp, self.read.trc),
            ("write.trcd", self.write.trcd, self.write.trc),
            ("write.tburst", self.write.tburst, self.write.trc),
            ("write.twr", self.write.twr, self.write.trc),
            ("write.trp", self.write.trp, self.write.trc),
        ];
        for (name, v, trc) in phases {
            if !(v >= 0.0 && v <= trc) {
                return Err(MemoryError::InvalidTiming(format!(
                    "{name} = {v} must lie in [0, tRC = {trc}]"
                )));
            }
        }
        if self.tdsc == 0 {
            return Err(MemoryError::InvalidTiming("tdsc must be >= 1".into()));
        }
        if !(self.verify_ns >= 0.0) || self.verify_cycles() >= self.write_cycles() {
            return Err(MemoryError::InvalidTiming(format!(
                "verify_ns = {} must be shorter than the write row cycle",
                self.verify_ns
            )));
        }
        Ok(())
    }
}
