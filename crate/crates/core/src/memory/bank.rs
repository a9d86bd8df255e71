use super::{Block, MemoryError, Mode, PumpControl, TimingParams, VoltageTable};
use crate::aging::{
    accumulate_counters, apply_destress, compute_unit_aging, AgingError, AgingParams, BlockAging,
    RecoveryPolicy, UnitAging, VoltageSegment,
};

/// Whether the three logic blocks share one de-stress control (baseline,
/// LASER) or can be de-stressed independently (Decoupled-LASER).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Architecture {
    Coupled,
    Decoupled,
}

/// Precomputed per-block aging rates shared by every bank.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockUnits {
    pub unit: [UnitAging; 3],
    /// Aging per cycle, indexed `[block][Read, Write, Idle]`.
    per_cycle: [[f64; 3]; 3],
    /// Stress voltage per cycle, `None` below threshold.
    stress_voltage: [[Option<f64>; 3]; 3],
    pub policy: RecoveryPolicy,
}

fn mode_slot(mode: Mode) -> usize {
    match mode {
        Mode::Read => 0,
        Mode::Write => 1,
        Mode::Idle => 2,
        Mode::DeStress => unreachable!("de-stress does not age"),
    }
}

impl BlockUnits {
    pub fn new(
        timing: &TimingParams,
        voltages: &VoltageTable,
        params: &AgingParams,
        policy: RecoveryPolicy,
    ) -> Result<Self, AgingError> {
        let mut unit = [UnitAging::default(); 3];
        let mut per_cycle = [[0.0; 3]; 3];
        let mut stress_voltage = [[None; 3]; 3];
        for b in Block::ALL {
            let i = b.index();
            unit[i] = compute_unit_aging(b, timing, voltages, params)?;
            per_cycle[i] = [
                unit[i].read / timing.read_cycles() as f64,
                unit[i].write / timing.write_cycles() as f64,
                unit[i].idle,
            ];
            for m in [Mode::Read, Mode::Write, Mode::Idle] {
                stress_voltage[i][mode_slot(m)] = params.stress_voltage(voltages.operating(b, m));
            }
        }
        Ok(Self {
            unit,
            per_cycle,
            stress_voltage,
            policy,
        })
    }

    pub fn per_cycle(&self, block: Block, mode: Mode) -> f64 {
        self.per_cycle[block.index()][mode_slot(mode)]
    }

    pub fn stress_voltage(&self, block: Block, mode: Mode) -> Option<f64> {
        self.stress_voltage[block.index()][mode_slot(mode)]
    }

    /// Largest aging one request can add to `block`.
    pub fn max_request(&self, block: Block) -> f64 {
        let u = &self.unit[block.index()];
        u.read.max(u.write)
    }
}

/// Activity counters of one block, flushed into the aging accumulator when
/// a field saturates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Counters {
    pub n_read: u8,
    pub n_write: u8,
    pub n_idle: u16,
}

impl Counters {
    pub const REQUEST_MAX: u8 = 15;
    pub const IDLE_MAX: u16 = u16::MAX;

    pub fn aging(&self, unit: &UnitAging) -> f64 {
        accumulate_counters(
            self.n_read as u64,
            self.n_write as u64,
            self.n_idle as u64,
            unit,
        )
    }

    pub fn is_zero(&self) -> bool {
        *self == Counters::default()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogicBlockState {
    pub block: Block,
    /// Remaining de-stress cycles; zero means the block is active.
    pub destress_remaining: u64,
    pub aging: BlockAging,
    /// Flushed stress since the last completed de-stress.
    pub since_destress: f64,
    /// All stress ever accrued, before any recovery.
    pub cumulative: f64,
    pub counters: Counters,
    /// Idle cycles since the bank last served a request or this block was
    /// de-stressed.
    pub idle_run: u64,
    pub serving_cycles: u64,
    pub idle_cycles: u64,
    pub destress_cycles: u64,
    pub destress_count: u64,
    pub timeline: Option<Vec<VoltageSegment>>,
}

impl LogicBlockState {
    pub fn new(block: Block, record_timeline: bool) -> Self {
        Self {
            block,
            destress_remaining: 0,
            aging: BlockAging::default(),
            since_destress: 0.0,
            cumulative: 0.0,
            counters: Counters::default(),
            idle_run: 0,
            serving_cycles: 0,
            idle_cycles: 0,
            destress_cycles: 0,
            destress_count: 0,
            timeline: record_timeline.then(Vec::new),
        }
    }

    pub fn is_active(&self) -> bool {
        self.destress_remaining == 0
    }

    /// Aging since the last de-stress, counters included.
    pub fn tracked_aging(&self, units: &BlockUnits) -> f64 {
        self.since_destress + self.counters.aging(&units.unit[self.block.index()])
    }

    /// Aging state as it would read after flushing the counters.
    pub fn settled(&self, units: &BlockUnits) -> BlockAging {
        let mut a = self.aging;
        a.accrue(
            self.counters.aging(&units.unit[self.block.index()]),
            &units.policy,
        );
        a
    }

    pub fn settled_cumulative(&self, units: &BlockUnits) -> f64 {
        self.cumulative + self.counters.aging(&units.unit[self.block.index()])
    }

    fn accrue(&mut self, delta: f64, policy: &RecoveryPolicy) {
        if delta > 0.0 {
            self.cumulative += delta;
            self.since_destress += delta;
            self.aging.accrue(delta, policy);
        }
    }

    pub fn flush(&mut self, units: &BlockUnits) {
        if !self.counters.is_zero() {
            let delta = self.counters.aging(&units.unit[self.block.index()]);
            self.counters = Counters::default();
            self.accrue(delta, &units.policy);
        }
    }

    fn record(&mut self, voltage: Option<f64>) {
        if let (Some(t), Some(v)) = (self.timeline.as_mut(), voltage) {
            match t.last_mut() {
                Some(last) if last.voltage == v => last.duration += 1.0,
                _ => t.push(VoltageSegment::new(1.0, v)),
            }
        }
    }

    fn count_request(&mut self, write: bool, units: &BlockUnits) {
        let c = if write {
            &mut self.counters.n_write
        } else {
            &mut self.counters.n_read
        };
        *c += 1;
        if *c == Counters::REQUEST_MAX {
            self.flush(units);
        }
    }
}

/// How a block's aging is charged while the bank serves an access.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockPlan {
    /// Whole request counted in the read/write counter at issue.
    Counted,
    /// Charged cycle by cycle, for blocks that are de-stressing when the
    /// access starts or take part in a split program/verify write.
    PerCycle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InFlight {
    pub request: u64,
    pub write: bool,
    pub start: u64,
    pub end: u64,
    pub plan: [BlockPlan; 3],
    /// `(program_end, verify_start)` of a write whose verify waits for the
    /// verify logic to finish de-stressing.
    pub deferred: Option<(u64, u64)>,
}

impl InFlight {
    fn mode_at(&self, block: Block, cycle: u64) -> Mode {
        let kind = if self.write { Mode::Write } else { Mode::Read };
        match self.deferred {
            None => kind,
            Some((program_end, verify_start)) => {
                let stressed = match block {
                    Block::Ps => cycle < program_end,
                    Block::Vr | Block::Sa => cycle >= verify_start,
                };
                if stressed {
                    Mode::Write
                } else {
                    Mode::Idle
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BankState {
    pub id: usize,
    /// First cycle at which the bank can start another access.
    pub busy_until: u64,
    pub access: Option<InFlight>,
    pub blocks: [LogicBlockState; 3],
    pub pending_verify: Option<u64>,
    pub last_row: Option<u64>,
    pub served: u64,
    pub served_since_destress: u64,
    pub destress_count: u64,
}

impl BankState {
    pub fn new(id: usize, record_timeline: bool) -> Self {
        Self {
            id,
            busy_until: 0,
            access: None,
            blocks: Block::ALL.map(|b| LogicBlockState::new(b, record_timeline)),
            pending_verify: None,
            last_row: None,
            served: 0,
            served_since_destress: 0,
            destress_count: 0,
        }
    }

    pub fn block(&self, b: Block) -> &LogicBlockState {
        &self.blocks[b.index()]
    }

    pub fn is_busy(&self, now: u64) -> bool {
        now < self.busy_until
    }

    pub fn any_destressing(&self) -> bool {
        self.blocks.iter().any(|b| !b.is_active())
    }

    /// Whether an access of the given kind could start now.
    pub fn can_serve(&self, write: bool, now: u64, arch: Architecture) -> bool {
        if self.is_busy(now) {
            return false;
        }
        match arch {
            Architecture::Coupled => !self.any_destressing(),
            Architecture::Decoupled if write => self.block(Block::Ps).is_active(),
            Architecture::Decoupled => self.block(Block::Sa).is_active(),
        }
    }

    /// Max over blocks of the idle run, the scheduler's ranking key.
    pub fn idle_run(&self) -> u64 {
        self.blocks.iter().map(|b| b.idle_run).max().unwrap_or(0)
    }

    /// Overall tracked aging since the last de-stress.
    pub fn tracked_aging(&self, units: &BlockUnits) -> f64 {
        let [ps, vr, sa] = [0, 1, 2].map(|i| self.blocks[i].tracked_aging(units));
        crate::aging::overall_aging(ps, vr, sa)
    }

    fn scheduling_error(&self, now: u64, what: &str, reason: impl Into<String>) -> MemoryError {
        MemoryError::Scheduling {
            bank: self.id,
            now,
            what: what.to_string(),
            reason: reason.into(),
        }
    }

    /// Start a read or write. Returns the completion cycle.
    pub fn issue_access(
        &mut self,
        request: u64,
        write: bool,
        row: u64,
        now: u64,
        timing: &TimingParams,
        units: &BlockUnits,
    ) -> Result<u64, MemoryError> {
        let what = if write { "write" } else { "read" };
        if self.is_busy(now) || self.access.is_some() {
            return Err(self.scheduling_error(
                now,
                what,
                format!("busy until cycle {}", self.busy_until),
            ));
        }
        let required = if write { Block::Ps } else { Block::Sa };
        if !self.block(required).is_active() {
            return Err(self.scheduling_error(now, what, format!("{required} is de-stressing")));
        }

        let defer = write && !self.block(Block::Vr).is_active();
        let (end, deferred) = if defer {
            let program_end = now + timing.program_cycles();
            let verify_start = program_end.max(now + self.block(Block::Vr).destress_remaining);
            (
                verify_start + timing.verify_cycles(),
                Some((program_end, verify_start)),
            )
        } else {
            (now + timing.access_cycles(write), None)
        };

        let mut plan = [BlockPlan::PerCycle; 3];
        for (i, blk) in self.blocks.iter_mut().enumerate() {
            if deferred.is_none() && blk.is_active() {
                plan[i] = BlockPlan::Counted;
                blk.count_request(write, units);
            }
            blk.idle_run = 0;
        }
        self.access = Some(InFlight {
            request,
            write,
            start: now,
            end,
            plan,
            deferred,
        });
        self.pending_verify = deferred.map(|(_, v)| v);
        self.busy_until = end;
        self.last_row = Some(row);
        self.served += 1;
        self.served_since_destress += 1;
        Ok(end)
    }

    /// Discharge pumps according to `pumps`. Returns the blocks that started
    /// a de-stress.
    pub fn begin_destress(
        &mut self,
        pumps: PumpControl,
        arch: Architecture,
        now: u64,
        timing: &TimingParams,
    ) -> Result<Vec<Block>, MemoryError> {
        pumps.permitted(arch)?;
        if arch == Architecture::Coupled && (self.is_busy(now) || self.access.is_some()) {
            return Err(self.scheduling_error(now, "de-stress", "access in flight"));
        }
        let mut started = Vec::new();
        for b in Block::ALL {
            if !pumps.destresses(b) || !self.block(b).is_active() {
                continue;
            }
            if let Some(acc) = &self.access {
                if acc.plan[b.index()] == BlockPlan::Counted {
                    return Err(self.scheduling_error(
                        now,
                        "de-stress",
                        format!("{b} is serving request {}", acc.request),
                    ));
                }
            }
            let blk = &mut self.blocks[b.index()];
            blk.destress_remaining = timing.destress_cycles();
            blk.destress_count += 1;
            blk.idle_run = 0;
            started.push(b);
        }
        if !started.is_empty() {
            self.destress_count += 1;
            self.served_since_destress = 0;
        }
        Ok(started)
    }

    /// Advance one cycle, charging `now` to every block.
    pub fn tick(&mut self, now: u64, units: &BlockUnits) {
        let serving = self
            .access
            .as_ref()
            .filter(|a| now >= a.start && now < a.end);
        for blk in self.blocks.iter_mut() {
            let b = blk.block;
            if blk.destress_remaining > 0 {
                blk.destress_cycles += 1;
                blk.destress_remaining -= 1;
                if blk.destress_remaining == 0 {
                    blk.flush(units);
                    blk.aging = apply_destress(blk.aging, &units.policy);
                    blk.since_destress = 0.0;
                }
            } else if let Some(acc) = serving {
                blk.serving_cycles += 1;
                let mode = acc.mode_at(b, now);
                if acc.plan[b.index()] == BlockPlan::PerCycle {
                    blk.accrue(units.per_cycle(b, mode), &units.policy);
                }
                blk.record(units.stress_voltage(b, mode));
            } else {
                blk.idle_cycles += 1;
                blk.idle_run += 1;
                blk.counters.n_idle += 1;
                if blk.counters.n_idle == Counters::IDLE_MAX {
                    blk.flush(units);
                }
                blk.record(units.stress_voltage(b, Mode::Idle));
            }
        }
        if self.access.as_ref().is_some_and(|a| now + 1 >= a.end) {
            self.access = None;
            self.pending_verify = None;
        }
    }

    /// Flush all counters into the aging accumulators.
    pub fn flush(&mut self, units: &BlockUnits) {
        for blk in self.blocks.iter_mut() {
            blk.flush(units);
        }
    }
}
