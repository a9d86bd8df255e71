use std::fmt;

use super::{RequestQueue, SchedulerConfig};
use crate::memory::{Architecture, BankState, Block, BlockUnits, PumpControl};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DestressReason {
    /// Baseline period of tDSI served requests.
    Period,
    Aging,
    Idle,
}

impl fmt::Display for DestressReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DestressReason::Period => "period",
            DestressReason::Aging => "aging",
            DestressReason::Idle => "idle",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Selection {
    /// Position in the queue.
    pub index: usize,
    pub backlog: bool,
}

/// FR-FCFS: among requests whose bank can serve them, the oldest one that
/// hits the bank's last row, else the oldest.
pub fn select_baseline(queue: &RequestQueue, banks: &[BankState], now: u64) -> Option<usize> {
    let mut oldest = None;
    for (i, r) in queue.iter().enumerate() {
        let bank = &banks[r.bank];
        if !bank.can_serve(r.is_write(), now, Architecture::Coupled) {
            continue;
        }
        if bank.last_row == Some(r.row) {
            return Some(i);
        }
        oldest.get_or_insert(i);
    }
    oldest
}

/// Baseline de-stress: the bank has served tDSI requests since its last one.
pub fn destress_baseline(bank: &BankState, config: &SchedulerConfig) -> bool {
    bank.served_since_destress >= config.tdsi
}

/// LASER selection: the oldest request waiting longer than th_backlog, else
/// a request to the serviceable bank idle the longest, ties by arrival.
pub fn select_laser(
    queue: &RequestQueue,
    banks: &[BankState],
    now: u64,
    config: &SchedulerConfig,
    arch: Architecture,
) -> Option<Selection> {
    let mut best: Option<(usize, u64)> = None;
    for (i, r) in queue.iter().enumerate() {
        let bank = &banks[r.bank];
        if !bank.can_serve(r.is_write(), now, arch) {
            continue;
        }
        if r.waited(now) > config.th_backlog {
            return Some(Selection {
                index: i,
                backlog: true,
            });
        }
        let idle = bank.idle_run();
        if best.is_none_or(|(_, b)| idle > b) {
            best = Some((i, idle));
        }
    }
    best.map(|(index, _)| Selection {
        index,
        backlog: false,
    })
}

/// Whole-bank threshold check.
pub fn destress_decision_laser(
    bank: &BankState,
    units: &BlockUnits,
    config: &SchedulerConfig,
) -> Option<DestressReason> {
    if bank.tracked_aging(units) > config.th_aging {
        Some(DestressReason::Aging)
    } else if bank.idle_run() > config.th_idle {
        Some(DestressReason::Idle)
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockDecision {
    pub row: PumpControl,
    /// Blocks that crossed a threshold.
    pub blocks: Vec<Block>,
    pub reason: DestressReason,
}

/// Per-block threshold check. A block is due when one more request could
/// take it past th_aging, or when it has idled past th_idle. The returned
/// pump row covers every due block.
pub fn destress_decision_decoupled(
    bank: &BankState,
    units: &BlockUnits,
    config: &SchedulerConfig,
) -> Option<BlockDecision> {
    let mut blocks = Vec::new();
    let mut reason = DestressReason::Idle;
    for b in Block::ALL {
        let state = bank.block(b);
        if !state.is_active() {
            continue;
        }
        if state.tracked_aging(units) + units.max_request(b) > config.th_aging {
            blocks.push(b);
            reason = DestressReason::Aging;
        } else if state.idle_run > config.th_idle {
            blocks.push(b);
        }
    }
    (!blocks.is_empty()).then(|| BlockDecision {
        row: PumpControl::covering(blocks.iter().copied()),
        blocks,
        reason,
    })
}
