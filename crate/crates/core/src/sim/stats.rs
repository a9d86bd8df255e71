use super::SimError;
use crate::aging::VoltageSegment;
use crate::controller::{Action, Policy, StorageAudit};

/// Nanoseconds in a 365.25-day year.
pub const CYCLES_PER_YEAR_NS: f64 = 365.25 * 86_400.0 * 1e9;

#[derive(Debug, Clone, PartialEq)]
pub struct BlockStats {
    pub recoverable: f64,
    pub permanent: f64,
    /// Total stress before recovery.
    pub cumulative: f64,
    pub serving_cycles: u64,
    pub idle_cycles: u64,
    pub destress_cycles: u64,
    pub destress_count: u64,
    pub timeline: Option<Vec<VoltageSegment>>,
}

impl BlockStats {
    pub fn total(&self) -> f64 {
        self.recoverable + self.permanent
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BankStats {
    pub served: u64,
    pub destress_count: u64,
    /// `[PS, VR, SA]`.
    pub blocks: [BlockStats; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgingSample {
    pub cycle: u64,
    /// Total aging per bank and block.
    pub aging: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WaitStats {
    pub count: u64,
    pub min: u64,
    pub mean: f64,
    pub max: u64,
    pub p99: u64,
}

impl WaitStats {
    pub fn from_waits(waits: &mut [u64]) -> Self {
        if waits.is_empty() {
            return Self::default();
        }
        waits.sort_unstable();
        let n = waits.len();
        let rank = ((0.99 * n as f64).ceil() as usize).clamp(1, n);
        Self {
            count: n as u64,
            min: waits[0],
            mean: waits.iter().map(|&w| w as f64).sum::<f64>() / n as f64,
            max: waits[n - 1],
            p99: waits[rank - 1],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimStats {
    pub policy: Policy,
    pub workload: String,
    pub cycles_elapsed: u64,
    pub clock_ns: f64,
    pub trace_len: u64,
    pub reads_served: u64,
    pub writes_served: u64,
    pub truncated: bool,
    pub banks: Vec<BankStats>,
    pub samples: Vec<AgingSample>,
    /// Bank cycles spent de-stressing while not serving a request.
    pub destress_busy_cycles: u64,
    /// Bank cycles spent serving requests.
    pub service_busy_cycles: u64,
    pub waits: WaitStats,
    pub failure_aging: f64,
    pub storage: StorageAudit,
    pub actions: Option<Vec<Action>>,
}

impl SimStats {
    pub fn requests_served(&self) -> u64 {
        self.reads_served + self.writes_served
    }

    pub fn exec_time_ns(&self) -> f64 {
        self.cycles_elapsed as f64 * self.clock_ns
    }

    pub fn destress_count(&self) -> u64 {
        self.banks.iter().map(|b| b.destress_count).sum()
    }

    fn blocks(&self) -> impl Iterator<Item = &BlockStats> {
        self.banks.iter().flat_map(|b| b.blocks.iter())
    }

    /// Largest recoverable plus permanent aging of any block.
    pub fn max_aging(&self) -> f64 {
        self.blocks().map(BlockStats::total).fold(0.0, f64::max)
    }

    pub fn max_permanent(&self) -> f64 {
        self.blocks().map(|b| b.permanent).fold(0.0, f64::max)
    }

    /// Sum over banks of the given block's cumulative stress.
    pub fn cumulative_by_block(&self) -> [f64; 3] {
        let mut out = [0.0; 3];
        for bank in &self.banks {
            for (o, b) in out.iter_mut().zip(&bank.blocks) {
                *o += b.cumulative;
            }
        }
        out
    }
}

/// De-stress time as a fraction of request service time.
pub fn destress_overhead(stats: &SimStats) -> Result<f64, SimError> {
    if stats.cycles_elapsed == 0 || stats.service_busy_cycles == 0 {
        return Err(SimError::Undefined("de-stress overhead"));
    }
    Ok(stats.destress_busy_cycles as f64 / stats.service_busy_cycles as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mttf {
    Finite {
        cycles: f64,
    },
    /// No permanent aging accrued, so no finite extrapolation exists.
    ExceedsHorizon,
}

impl Mttf {
    pub fn years(&self, clock_ns: f64) -> f64 {
        match self {
            Mttf::Finite { cycles } => cycles * clock_ns / CYCLES_PER_YEAR_NS,
            Mttf::ExceedsHorizon => f64::INFINITY,
        }
    }
}

/// Linear extrapolation of the worst block's permanent-aging rate to the
/// failure level.
pub fn estimate_mttf(stats: &SimStats) -> Result<Mttf, SimError> {
    if stats.cycles_elapsed == 0 {
        return Err(SimError::Undefined("MTTF"));
    }
    let worst = stats.max_permanent();
    if worst <= 0.0 {
        return Ok(Mttf::ExceedsHorizon);
    }
    let rate = worst / stats.cycles_elapsed as f64;
    Ok(Mttf::Finite {
        cycles: stats.failure_aging / rate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wait_percentiles() {
        let mut w: Vec<u64> = (1..=100).collect();
        let s = WaitStats::from_waits(&mut w);
        assert_eq!((s.min, s.max, s.p99, s.count), (1, 100, 99, 100));
        assert!((s.mean - 50.5).abs() < 1e-12);
        assert_eq!(WaitStats::from_waits(&mut []), WaitStats::default());
        assert_eq!(WaitStats::from_waits(&mut [7]).p99, 7);
    }
}
