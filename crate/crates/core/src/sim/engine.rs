use super::stats::{AgingSample, BankStats, BlockStats, SimStats, WaitStats};
use super::{SimConfig, SimError, Workload};
use crate::controller::{Controller, Policy, Request};
use crate::memory::{BankState, BlockUnits};
use crate::workload::{generate, read_trace, write_cache_filter, TraceRecord};

fn load(config: &SimConfig) -> Result<Vec<TraceRecord>, SimError> {
    let records = match &config.workload {
        Workload::Generated(spec) => generate(spec)?,
        Workload::TraceFile(path) => read_trace(path)?,
        Workload::Records { records, .. } => records.as_ref().clone(),
    };
    if config.write_cache_hit_rate > 0.0 {
        Ok(write_cache_filter(
            &records,
            config.write_cache_hit_rate,
            config.write_cache_seed,
        )?)
    } else {
        Ok(records)
    }
}

/// Simulate the configured workload until it drains.
pub fn run(config: &SimConfig) -> Result<SimStats, SimError> {
    config.validate()?;
    let records = load(config)?;
    run_trace(config, &records)
}

fn sample(cycle: u64, banks: &[BankState], units: &BlockUnits) -> AgingSample {
    AgingSample {
        cycle,
        aging: banks
            .iter()
            .map(|b| std::array::from_fn(|i| b.blocks[i].settled(units).total()))
            .collect(),
    }
}

/// Simulate an explicit trace with the rest of `config`.
pub fn run_trace(config: &SimConfig, records: &[TraceRecord]) -> Result<SimStats, SimError> {
    config.validate()?;
    let geo = &config.geometry;
    let timing = &config.timing;
    let units = BlockUnits::new(timing, &config.voltages, &config.aging, config.recovery)?;
    let n_banks = geo.total_banks();
    let mut banks: Vec<BankState> = (0..n_banks)
        .map(|i| BankState::new(i, config.record_timeline))
        .collect();
    let mut ctrl = Controller::new(
        config.scheduler.clone(),
        n_banks,
        &units,
        config.record_actions,
    )?;

    let decoded = records
        .iter()
        .map(|r| {
            let d = geo.decode(r.address)?;
            Ok((
                geo.bank_index(&d),
                d.row * geo.partitions_per_bank + d.partition,
            ))
        })
        .collect::<Result<Vec<_>, SimError>>()?;

    let coupled_bound = config.scheduler.th_aging
        + units
            .unit
            .iter()
            .map(|u| 15.0 * (u.read + u.write) + 65_536.0 * u.idle)
            .fold(0.0, f64::max);

    let mut next = 0usize;
    let mut now = 0u64;
    let mut last_completion = 0u64;
    let mut waits = Vec::with_capacity(records.len());
    let (mut reads, mut writes) = (0u64, 0u64);
    let (mut destress_busy, mut service_busy) = (0u64, 0u64);
    let mut samples = Vec::new();
    let mut truncated = false;

    loop {
        while next < records.len() && records[next].arrival_cycle <= now {
            let (bank, row) = decoded[next];
            let req = Request {
                id: next as u64,
                kind: records[next].kind,
                bank,
                row,
                arrival_cycle: now,
                issue_cycle: None,
            };
            if ctrl.queue.enqueue(req).is_err() {
                break;
            }
            next += 1;
        }

        if let Some(issued) = ctrl.tick(now, &mut banks, timing, &units)? {
            waits.push(now - issued.request.arrival_cycle);
            if issued.request.is_write() {
                writes += 1;
            } else {
                reads += 1;
            }
            last_completion = last_completion.max(issued.completion);
        }

        if next == records.len() && ctrl.queue.is_empty() && last_completion <= now {
            break;
        }
        if config.max_cycles.is_some_and(|m| now >= m) {
            truncated = true;
            break;
        }

        if now.is_multiple_of(config.sample_interval) {
            samples.push(sample(now, &banks, &units));
        }
        for bank in banks.iter_mut() {
            let serving = bank
                .access
                .as_ref()
                .is_some_and(|a| now >= a.start && now < a.end);
            if serving {
                service_busy += 1;
            } else if bank.any_destressing() {
                destress_busy += 1;
            }
            bank.tick(now, &units);
        }

        if config.check_invariants && config.scheduler.policy != Policy::Baseline {
            for bank in &banks {
                for blk in &bank.blocks {
                    let tracked = blk.tracked_aging(&units);
                    if tracked > coupled_bound {
                        return Err(SimError::Assertion {
                            cycle: now,
                            message: format!(
                                "bank {} {} tracked aging {tracked} exceeds {coupled_bound}",
                                bank.id, blk.block
                            ),
                        });
                    }
                }
            }
        }
        now += 1;
    }

    let cycles_elapsed = now;
    for bank in banks.iter_mut() {
        bank.flush(&units);
    }
    if samples.last().is_none_or(|s| s.cycle != cycles_elapsed) {
        samples.push(sample(cycles_elapsed, &banks, &units));
    }
    let bank_stats = banks
        .into_iter()
        .map(|b| BankStats {
            served: b.served,
            destress_count: b.destress_count,
            blocks: b.blocks.map(|blk| BlockStats {
                recoverable: blk.aging.recoverable,
                permanent: blk.aging.permanent,
                cumulative: blk.cumulative,
                serving_cycles: blk.serving_cycles,
                idle_cycles: blk.idle_cycles,
                destress_cycles: blk.destress_cycles,
                destress_count: blk.destress_count,
                timeline: blk.timeline,
            }),
        })
        .collect();

    Ok(SimStats {
        policy: config.scheduler.policy,
        workload: config.label(),
        cycles_elapsed,
        clock_ns: timing.clock_ns,
        trace_len: records.len() as u64,
        reads_served: reads,
        writes_served: writes,
        truncated,
        banks: bank_stats,
        samples,
        destress_busy_cycles: destress_busy,
        service_busy_cycles: service_busy,
        waits: WaitStats::from_waits(&mut waits),
        failure_aging: config.failure_aging,
        storage: ctrl.storage_audit(),
        actions: ctrl.take_action_log(),
    })
}
