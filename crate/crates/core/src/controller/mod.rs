//! Request queue, controller tables and the three schedulers.

mod queue;
mod schedule;
mod tables;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use queue::{Request, RequestQueue};
pub use schedule::{
    destress_baseline, destress_decision_decoupled, destress_decision_laser, select_baseline,
    select_laser, BlockDecision, DestressReason, Selection,
};
pub use tables::{
    FixedPoint, StatusTable, StorageAudit, UnitAgingTable, ACCESS_ENTRY_BITS, IDLE_COUNTER_BITS,
    REQUEST_COUNTER_BITS,
};

use crate::memory::{
    Architecture, BankState, Block, BlockUnits, MemoryError, PumpControl, TimingParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Policy {
    Baseline,
    Laser,
    DecoupledLaser,
}

impl Policy {
    pub const ALL: [Policy; 3] = [Policy::Baseline, Policy::Laser, Policy::DecoupledLaser];

    pub fn name(self) -> &'static str {
        match self {
            Policy::Baseline => "baseline",
            Policy::Laser => "laser",
            Policy::DecoupledLaser => "decoupled-laser",
        }
    }

    pub fn architecture(self) -> Architecture {
        match self {
            Policy::DecoupledLaser => Architecture::Decoupled,
            _ => Architecture::Coupled,
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "baseline" => Ok(Policy::Baseline),
            "laser" => Ok(Policy::Laser),
            "decoupled-laser" | "decoupled" => Ok(Policy::DecoupledLaser),
            _ => Err(format!(
                "unknown policy {s:?}, expected baseline, laser or decoupled-laser"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchedulerConfig {
    pub policy: Policy,
    /// Requests served between baseline de-stresses.
    pub tdsi: u64,
    pub th_aging: f64,
    pub th_idle: u64,
    pub th_backlog: u64,
    pub queue_capacity: usize,
    /// De-stress threshold-crossing banks that have no queued request.
    pub background_sweep: bool,
}

impl Default for SchedulerConfig {
    fn default() -> Self {
        Self {
            policy: Policy::Baseline,
            tdsi: 100,
            th_aging: 1000.0,
            th_idle: (1 << 16) - 1,
            th_backlog: 10_000,
            queue_capacity: 64,
            background_sweep: true,
        }
    }
}

impl SchedulerConfig {
    pub fn with_policy(policy: Policy) -> Self {
        Self {
            policy,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ControllerError> {
        let bad = |name: &'static str, v: String| {
            Err(ControllerError::InvalidConfig {
                name,
                reason: format!("must be > 0, got {v}"),
            })
        };
        if self.tdsi == 0 {
            return bad("tdsi", self.tdsi.to_string());
        }
        if !(self.th_aging > 0.0) {
            return bad("th_aging", self.th_aging.to_string());
        }
        if self.th_idle == 0 {
            return bad("th_idle", self.th_idle.to_string());
        }
        if self.th_backlog == 0 {
            return bad("th_backlog", self.th_backlog.to_string());
        }
        if self.queue_capacity == 0 {
            return bad("queue_capacity", self.queue_capacity.to_string());
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ControllerError {
    #[error("invalid scheduler setting {name}: {reason}")]
    InvalidConfig { name: &'static str, reason: String },
    #[error(transparent)]
    Memory(#[from] MemoryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionKind {
    Issue,
    Destress,
    Sweep,
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ActionKind::Issue => "issue",
            ActionKind::Destress => "destress",
            ActionKind::Sweep => "sweep",
        })
    }
}

/// One line of the action log, `cycle,bank,action,detail`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    pub cycle: u64,
    pub bank: usize,
    pub kind: ActionKind,
    pub detail: String,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{}",
            self.cycle, self.bank, self.kind, self.detail
        )
    }
}

fn block_list(blocks: &[Block]) -> String {
    blocks
        .iter()
        .map(|b| b.name())
        .collect::<Vec<_>>()
        .join("+")
}

/// A request the controller started this cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issued {
    pub request: Request,
    pub completion: u64,
}

#[derive(Debug, Clone)]
pub struct Controller {
    pub config: SchedulerConfig,
    pub arch: Architecture,
    pub queue: RequestQueue,
    pub status: StatusTable,
    pub unit_table: UnitAgingTable,
    log: Option<Vec<Action>>,
}

impl Controller {
    pub fn new(
        config: SchedulerConfig,
        banks: usize,
        units: &BlockUnits,
        record_log: bool,
    ) -> Result<Self, ControllerError> {
        config.validate()?;
        let arch = config.policy.architecture();
        Ok(Self {
            queue: RequestQueue::new(config.queue_capacity, banks),
            status: StatusTable::new(banks),
            unit_table: UnitAgingTable::new(units, arch),
            arch,
            config,
            log: record_log.then(Vec::new),
        })
    }

    pub fn storage_audit(&self) -> StorageAudit {
        StorageAudit::new(self.status.bits(), self.arch)
    }

    pub fn action_log(&self) -> Option<&[Action]> {
        self.log.as_deref()
    }

    pub fn take_action_log(&mut self) -> Option<Vec<Action>> {
        self.log.as_mut().map(std::mem::take)
    }

    fn record(&mut self, cycle: u64, bank: usize, kind: ActionKind, detail: String) {
        if let Some(log) = self.log.as_mut() {
            log.push(Action {
                cycle,
                bank,
                kind,
                detail,
            });
        }
    }

    /// One controller cycle: refresh sTab, run the policy's select and
    /// de-stress decisions, and start at most one request.
    pub fn tick(
        &mut self,
        now: u64,
        banks: &mut [BankState],
        timing: &TimingParams,
        units: &BlockUnits,
    ) -> Result<Option<Issued>, ControllerError> {
        self.status.refresh(banks, now, self.arch);
        let issued = match self.config.policy {
            Policy::Baseline => self.tick_baseline(now, banks, timing, units)?,
            Policy::Laser => self.tick_laser(now, banks, timing, units)?,
            Policy::DecoupledLaser => self.tick_decoupled(now, banks, timing, units)?,
        };
        if self.config.background_sweep && self.config.policy != Policy::Baseline {
            self.sweep(now, banks, timing, units)?;
        }
        Ok(issued)
    }

    fn issue(
        &mut self,
        sel: Selection,
        now: u64,
        banks: &mut [BankState],
        timing: &TimingParams,
        units: &BlockUnits,
    ) -> Result<Issued, ControllerError> {
        let mut req = self.queue.remove(sel.index);
        let bank = &mut banks[req.bank];
        let completion = bank.issue_access(req.id, req.is_write(), req.row, now, timing, units)?;
        req.issue_cycle = Some(now);
        if self.log.is_some() {
            let mut detail = format!("{}#{}", req.kind, req.id);
            if let Some(v) = bank.pending_verify {
                detail.push_str(&format!("/verify@{v}"));
            }
            if sel.backlog {
                detail.push_str(":backlog");
            }
            self.record(now, req.bank, ActionKind::Issue, detail);
        }
        Ok(Issued {
            request: req,
            completion,
        })
    }

    fn destress(
        &mut self,
        kind: ActionKind,
        row: PumpControl,
        reason: DestressReason,
        now: u64,
        bank: &mut BankState,
        timing: &TimingParams,
    ) -> Result<(), ControllerError> {
        let started = bank.begin_destress(row, self.arch, now, timing)?;
        let id = bank.id;
        if self.log.is_some() {
            self.record(now, id, kind, format!("{}:{reason}", block_list(&started)));
        }
        Ok(())
    }

    fn tick_baseline(
        &mut self,
        now: u64,
        banks: &mut [BankState],
        timing: &TimingParams,
        units: &BlockUnits,
    ) -> Result<Option<Issued>, ControllerError> {
        for bank in banks.iter_mut() {
            if !bank.is_busy(now)
                && !bank.any_destressing()
                && destress_baseline(bank, &self.config)
            {
                self.destress(
                    ActionKind::Destress,
                    PumpControl::ALL_DISCHARGED,
                    DestressReason::Period,
                    now,
                    bank,
                    timing,
                )?;
            }
        }
        match select_baseline(&self.queue, banks, now) {
            Some(index) => {
                let sel = Selection {
                    index,
                    backlog: false,
                };
                self.issue(sel, now, banks, timing, units).map(Some)
            }
            None => Ok(None),
        }
    }

    fn tick_laser(
        &mut self,
        now: u64,
        banks: &mut [BankState],
        timing: &TimingParams,
        units: &BlockUnits,
    ) -> Result<Option<Issued>, ControllerError> {
        let Some(sel) = select_laser(&self.queue, banks, now, &self.config, self.arch) else {
            return Ok(None);
        };
        let b = self.queue.get(sel.index).bank;
        if let Some(reason) = destress_decision_laser(&banks[b], units, &self.config) {
            let row = PumpControl::ALL_DISCHARGED;
            self.destress(
                ActionKind::Destress,
                row,
                reason,
                now,
                &mut banks[b],
                timing,
            )?;
            return Ok(None);
        }
        self.issue(sel, now, banks, timing, units).map(Some)
    }

    fn tick_decoupled(
        &mut self,
        now: u64,
        banks: &mut [BankState],
        timing: &TimingParams,
        units: &BlockUnits,
    ) -> Result<Option<Issued>, ControllerError> {
        let Some(sel) = select_laser(&self.queue, banks, now, &self.config, self.arch) else {
            return Ok(None);
        };
        let (b, write) = {
            let r = self.queue.get(sel.index);
            (r.bank, r.is_write())
        };
        if let Some(d) = destress_decision_decoupled(&banks[b], units, &self.config) {
            self.destress(
                ActionKind::Destress,
                d.row,
                d.reason,
                now,
                &mut banks[b],
                timing,
            )?;
            if !banks[b].can_serve(write, now, self.arch) {
                return Ok(None);
            }
        }
        self.issue(sel, now, banks, timing, units).map(Some)
    }

    /// De-stress at most one free bank that has no queued request and has
    /// crossed a threshold.
    fn sweep(
        &mut self,
        now: u64,
        banks: &mut [BankState],
        timing: &TimingParams,
        units: &BlockUnits,
    ) -> Result<(), ControllerError> {
        let pick = banks.iter().enumerate().find_map(|(i, bank)| {
            if bank.is_busy(now) || self.queue.pending_for(i) > 0 {
                return None;
            }
            let action = match self.arch {
                Architecture::Coupled if bank.any_destressing() => None,
                Architecture::Coupled => destress_decision_laser(bank, units, &self.config)
                    .map(|r| (PumpControl::ALL_DISCHARGED, r)),
                Architecture::Decoupled => destress_decision_decoupled(bank, units, &self.config)
                    .map(|d| (d.row, d.reason)),
            };
            action.map(|(row, reason)| (i, row, reason))
        });
        if let Some((i, row, reason)) = pick {
            return self.destress(ActionKind::Sweep, row, reason, now, &mut banks[i], timing);
        }
        Ok(())
    }
}
