//! End-to-end acceptance checks. Everything runs inside one test so the
//! runtime limits are measured without other tests competing for the CPU.
//!
//! Run with `cargo test -p nvmsim-cli --test acceptance -- --nocapture`.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use nvmsim_core::aging::{estimate_profile_mttf, piecewise_aging, BaselineProfile, VoltageSegment};
use nvmsim_core::controller::Policy;
use nvmsim_core::sim::{
    destress_overhead, estimate_mttf, run, SimConfig, SimStats, Workload, CYCLES_PER_YEAR_NS,
};
use nvmsim_core::workload::{GeneratorSpec, OpKind, TraceRecord};
use nvmsim_core::{AgingParams, MemoryGeometry};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    check: fn() -> Outcome,
}

const CRITERIA: [Criterion; 12] = [
    Criterion {
        id: 1,
        name: "analytic de-stress overhead",
        limit: Some(Duration::from_secs(10)),
        check: analytic_overhead,
    },
    Criterion {
        id: 2,
        name: "calibration round trip",
        limit: Some(Duration::from_secs(1)),
        check: calibration_round_trip,
    },
    Criterion {
        id: 3,
        name: "aging associativity",
        limit: None,
        check: associativity,
    },
    Criterion {
        id: 4,
        name: "counters match timeline oracle",
        limit: None,
        check: oracle_equivalence,
    },
    Criterion {
        id: 5,
        name: "permanent aging grows with tDSI",
        limit: Some(Duration::from_secs(10)),
        check: tdsi_direction,
    },
    Criterion {
        id: 6,
        name: "policy comparison directions",
        limit: Some(Duration::from_secs(60)),
        check: policy_directions,
    },
    Criterion {
        id: 7,
        name: "th_aging sweep directions",
        limit: None,
        check: threshold_sweep,
    },
    Criterion {
        id: 8,
        name: "aging increases with temperature",
        limit: None,
        check: temperature,
    },
    Criterion {
        id: 9,
        name: "starvation bound",
        limit: None,
        check: starvation,
    },
    Criterion {
        id: 10,
        name: "table storage audit",
        limit: None,
        check: storage_audit,
    },
    Criterion {
        id: 11,
        name: "compare is deterministic",
        limit: None,
        check: determinism,
    },
    Criterion {
        id: 12,
        name: "golden flowchart action log",
        limit: None,
        check: golden_log,
    },
];

#[test]
fn acceptance() {
    std::env::remove_var("NVMSIM_CONFIG");
    println!();
    let mut failed = Vec::new();
    for c in &CRITERIA {
        let start = Instant::now();
        let mut outcome = (c.check)();
        let took = start.elapsed();
        if let (Ok(detail), Some(limit)) = (&outcome, c.limit) {
            if took > limit {
                outcome = Err(format!("{detail}; took {took:.2?}, limit {limit:?}"));
            }
        }
        match &outcome {
            Ok(detail) => println!(
                "criterion {:>2} PASS  {} ({detail}; {took:.2?})",
                c.id, c.name
            ),
            Err(why) => {
                println!("criterion {:>2} FAIL  {} ({why}; {took:.2?})", c.id, c.name);
                failed.push(c.id);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sim(config: &SimConfig) -> Result<SimStats, String> {
    run(config).map_err(|e| e.to_string())
}

fn with(policy: Policy, workload: Workload) -> SimConfig {
    let mut c = SimConfig::default();
    c.scheduler.policy = policy;
    c.workload = workload;
    c
}

fn records(label: &str, recs: Vec<TraceRecord>) -> Workload {
    Workload::Records {
        label: label.into(),
        records: Arc::new(recs),
    }
}

fn mttf_years(s: &SimStats) -> Result<f64, String> {
    Ok(estimate_mttf(s)
        .map_err(|e| e.to_string())?
        .years(s.clock_ns))
}

fn overhead(s: &SimStats) -> Result<f64, String> {
    destress_overhead(s).map_err(|e| e.to_string())
}

fn small_geometry(banks: u64) -> MemoryGeometry {
    MemoryGeometry {
        channels: 1,
        ranks_per_channel: 1,
        banks_per_rank: banks,
        partitions_per_bank: 1,
        capacity_bytes: 64 * banks * 4096,
        line_bytes: 64,
    }
}

/// Random trace over `banks` banks with uniform gaps in `0..max_gap`.
fn random_trace(rng: &mut ChaCha8Rng, n: usize, banks: u64, max_gap: u64) -> Vec<TraceRecord> {
    let mut cycle = 0;
    (0..n)
        .map(|_| {
            cycle += rng.gen_range(0..max_gap);
            let kind = if rng.gen_bool(0.5) {
                OpKind::Read
            } else {
                OpKind::Write
            };
            TraceRecord::new(cycle, kind, rng.gen_range(0..banks * 4096) * 64)
        })
        .collect()
}

fn cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = nvmsim_cli::main_with(
        std::iter::once("nvmsim").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    if code == 0 {
        Ok(out)
    } else {
        Err(format!(
            "exit {code}: {}",
            String::from_utf8_lossy(&err).trim()
        ))
    }
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn analytic_overhead() -> Outcome {
    let c = with(
        Policy::Baseline,
        Workload::Generated(GeneratorSpec::microbenchmark(100_000, 1)),
    );
    ensure(c.timing.tdsc == 10 && c.scheduler.tdsi == 100, || {
        "unexpected defaults".into()
    })?;
    let o = overhead(&sim(&c)?)?;
    ensure((o - 0.100).abs() <= 0.005, || {
        format!("overhead {o:.4} outside 0.100 +- 0.005")
    })?;
    Ok(format!("overhead {o:.4}"))
}

fn calibration_round_trip() -> Outcome {
    let text = String::from_utf8(cli(&["calibrate", "--target-years", "2"])?)
        .map_err(|e| e.to_string())?;
    let doc: toml::Table = text.parse().map_err(|e: toml::de::Error| e.to_string())?;
    let a = doc["aging"]["material_constant"]
        .as_float()
        .ok_or("calibrated config lacks aging.material_constant")?;
    let base = SimConfig::default();
    let params = AgingParams::default().with_material_constant(a);
    let profile =
        BaselineProfile::periodic(&base.timing, 100, 0.5, 1.0).map_err(|e| e.to_string())?;
    let cycles = estimate_profile_mttf(
        &profile,
        &params,
        &base.voltages,
        &base.recovery,
        base.failure_aging,
    )
    .map_err(|e| e.to_string())?;
    let years = cycles * base.timing.clock_ns / CYCLES_PER_YEAR_NS;
    ensure((years / 2.0 - 1.0).abs() <= 0.01, || {
        format!("{years} years")
    })?;
    Ok(format!("A = {a:.6e}, MTTF {years:.6} years"))
}

/// Advance `idx` to the next lexicographic arrangement; false at the last.
fn next_permutation(idx: &mut [usize]) -> bool {
    let Some(i) = (1..idx.len()).rev().find(|&i| idx[i - 1] < idx[i]) else {
        return false;
    };
    let j = (i..idx.len()).rev().find(|&j| idx[j] > idx[i - 1]).unwrap();
    idx.swap(i - 1, j);
    idx[i..].reverse();
    true
}

fn associativity() -> Outcome {
    let params = AgingParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut orderings = 0u64;
    let mut worst = 0.0f64;
    for _ in 0..200 {
        // A small pool makes repeated segments likely, as in real histories.
        let pool: Vec<VoltageSegment> = (0..5)
            .map(|_| VoltageSegment::new(rng.gen_range(1.0..1e4), rng.gen_range(0.9..4.0)))
            .collect();
        let n = rng.gen_range(1..=10);
        let mut idx: Vec<usize> = (0..n).map(|_| rng.gen_range(0..pool.len())).collect();
        idx.sort_unstable();
        let mut segs = vec![pool[0]; n];
        let mut reference = None;
        loop {
            for (s, &i) in segs.iter_mut().zip(&idx) {
                *s = pool[i];
            }
            let a = piecewise_aging(&segs, &params).map_err(|e| e.to_string())?;
            let r = *reference.get_or_insert(a);
            let err = ((a - r) / r).abs();
            worst = worst.max(err);
            ensure(err <= 1e-12, || {
                format!("ordering {idx:?} differs by {err:e}")
            })?;
            orderings += 1;
            if !next_permutation(&mut idx) {
                break;
            }
        }
    }
    Ok(format!(
        "{orderings} orderings, worst relative error {worst:.1e}"
    ))
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let policy = Policy::ALL[i % 3];
        let n = rng.gen_range(1..=50);
        let mut c = with(
            policy,
            records("scripted", random_trace(&mut rng, n, 2, 400)),
        );
        c.geometry = small_geometry(2);
        c.scheduler.tdsi = 3;
        c.scheduler.th_aging = 60.0;
        c.record_timeline = true;
        let s = sim(&c)?;
        for bank in &s.banks {
            for b in &bank.blocks {
                let timeline = b.timeline.as_ref().ok_or("timeline not recorded")?;
                let oracle = piecewise_aging(timeline, &c.aging).map_err(|e| e.to_string())?;
                let err = if oracle == 0.0 {
                    b.cumulative
                } else {
                    ((b.cumulative - oracle) / oracle).abs()
                };
                worst = worst.max(err);
                ensure(err <= 1e-9, || {
                    format!("trace {i} ({policy}): {} vs {oracle}", b.cumulative)
                })?;
            }
        }
    }
    Ok(format!("100 traces, worst relative error {worst:.1e}"))
}

fn tdsi_direction() -> Outcome {
    let permanent = |tdsi| -> Result<f64, String> {
        let mut c = with(
            Policy::Baseline,
            Workload::Generated(GeneratorSpec::microbenchmark(10_000, 1)),
        );
        c.scheduler.tdsi = tdsi;
        Ok(sim(&c)?.max_permanent())
    };
    let (long, short) = (permanent(100)?, permanent(10)?);
    let ratio = long / short;
    ensure(long > short && ratio > 1.5, || {
        format!("tDSI 100: {long:.4e}, tDSI 10: {short:.4e}")
    })?;
    Ok(format!("tDSI 100 / tDSI 10 permanent aging = {ratio:.2}"))
}

fn mixed(policy: Policy, th_aging: f64) -> SimConfig {
    let mut c = with(
        policy,
        Workload::Generated(GeneratorSpec::mixed(100_000, 1)),
    );
    c.scheduler.th_aging = th_aging;
    c
}

fn policy_directions() -> Outcome {
    let th = SimConfig::default().scheduler.th_aging;
    let [b, l, d] = Policy::ALL.map(|p| sim(&mixed(p, th)));
    let (b, l, d) = (b?, l?, d?);
    let exec = [b.cycles_elapsed, l.cycles_elapsed, d.cycles_elapsed];
    let ovh = [overhead(&b)?, overhead(&l)?, overhead(&d)?];
    let mttf = [mttf_years(&b)?, mttf_years(&l)?, mttf_years(&d)?];
    let summary = format!("exec {exec:?}, overhead {ovh:.3?}, MTTF years {mttf:.2?}");
    ensure(exec[1] < exec[0] && exec[2] <= exec[1], || {
        format!("exec order: {summary}")
    })?;
    ensure(ovh[2] < ovh[1] && ovh[1] < ovh[0], || {
        format!("overhead order: {summary}")
    })?;
    ensure(mttf[1] >= mttf[0] && mttf[2] >= mttf[1], || {
        format!("MTTF order: {summary}")
    })?;
    Ok(summary)
}

fn threshold_sweep() -> Outcome {
    let mut lines = Vec::new();
    for p in [Policy::Laser, Policy::DecoupledLaser] {
        let mut exec = Vec::new();
        let mut aging = Vec::new();
        for th in [500.0, 1000.0, 2000.0] {
            let s = sim(&mixed(p, th))?;
            exec.push(s.cycles_elapsed);
            aging.push(s.max_aging());
        }
        let summary = format!("{p}: exec {exec:?}, aging {aging:.1?}");
        ensure(exec.windows(2).all(|w| w[1] <= w[0]), || {
            format!("exec not nonincreasing: {summary}")
        })?;
        ensure(aging.windows(2).all(|w| w[1] >= w[0]), || {
            format!("aging not nondecreasing: {summary}")
        })?;
        lines.push(summary);
    }
    Ok(lines.join("; "))
}

fn temperature() -> Outcome {
    let per_block: Vec<[f64; 3]> = [300.0, 325.0, 350.0]
        .into_iter()
        .map(|t| {
            let mut c = with(
                Policy::Baseline,
                Workload::Generated(GeneratorSpec::mixed(10_000, 2)),
            );
            c.aging = c.aging.with_temperature(t);
            sim(&c).map(|s| s.cumulative_by_block())
        })
        .collect::<Result<_, _>>()?;
    for b in 0..3 {
        ensure(per_block.windows(2).all(|w| w[1][b] > w[0][b]), || {
            format!("block {b} not increasing: {per_block:?}")
        })?;
    }
    Ok(format!(
        "PS aging {:.3e} -> {:.3e}",
        per_block[0][0], per_block[2][0]
    ))
}

fn starvation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst_slack = u64::MAX;
    for i in 0..1000 {
        let policy = if i % 2 == 0 {
            Policy::Laser
        } else {
            Policy::DecoupledLaser
        };
        let n = rng.gen_range(50..=300);
        let mut c = with(policy, records("random", random_trace(&mut rng, n, 4, 200)));
        c.geometry = small_geometry(4);
        c.scheduler.th_backlog = rng.gen_range(500..=5000);
        // Below about 500 the de-stress time alone saturates a bank's write path
        // and queued writes wait behind each other, which no per-request
        // bound can cover.
        c.scheduler.th_aging = rng.gen_range(500.0..=2000.0);
        let bound =
            c.scheduler.th_backlog + c.timing.destress_cycles() + c.timing.access_cycles(true);
        let s = sim(&c)?;
        ensure(s.waits.max <= bound, || {
            format!(
                "trace {i} ({policy}, th_aging {:.0}, th_backlog {}): wait {} > bound {bound}",
                c.scheduler.th_aging, c.scheduler.th_backlog, s.waits.max
            )
        })?;
        worst_slack = worst_slack.min(bound - s.waits.max);
    }
    Ok(format!("1000 traces, smallest slack {worst_slack} cycles"))
}

fn storage_audit() -> Outcome {
    let mut c = with(
        Policy::Laser,
        records("one", vec![TraceRecord::new(0, OpKind::Read, 0)]),
    );
    c.geometry.banks_per_rank = 64;
    ensure(c.geometry.total_banks() == 128, || {
        "geometry is not 128 banks".into()
    })?;
    let bits = sim(&c)?.storage.total_bits();
    ensure(bits == 3296, || format!("{bits} bits"))?;
    Ok(format!("{bits} bits"))
}

fn determinism() -> Outcome {
    let args = [
        "compare",
        "--seed",
        "7",
        "--set",
        "workload.kind=mixed",
        "--set",
        "workload.requests=20000",
    ];
    let (first, second) = (cli(&args)?, cli(&args)?);
    ensure(first == second, || "outputs differ".into())?;
    Ok(format!("{} identical bytes", first.len()))
}

fn golden_log() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let log = dir.path().join("log.csv");
    let (cfg, trace) = (golden("flowchart.cfg"), golden("flowchart_trace.txt"));
    cli(&[
        "run",
        "-c",
        cfg.to_str().unwrap(),
        "--trace",
        trace.to_str().unwrap(),
        "--action-log",
        log.to_str().unwrap(),
    ])?;
    let got = std::fs::read_to_string(&log).map_err(|e| e.to_string())?;
    let want = std::fs::read_to_string(golden("flowchart_log.csv")).map_err(|e| e.to_string())?;
    if got != want {
        let line = got.lines().zip(want.lines()).position(|(a, b)| a != b);
        return Err(format!("logs differ at line {line:?}"));
    }
    Ok(format!("{} actions match", want.lines().count() - 1))
}
