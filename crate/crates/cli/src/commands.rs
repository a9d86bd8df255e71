use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nvmsim_core::aging::{calibrate, estimate_profile_mttf, BaselineProfile};
use nvmsim_core::controller::Policy;
use nvmsim_core::sim::{
    emit_report, run, ReportFormat, ReportRow, SimConfig, SimStats, CYCLES_PER_YEAR_NS,
    REPORT_COLUMNS,
};
use nvmsim_core::workload::{generate, write_cache_filter, write_trace};
use rayon::prelude::*;

use crate::config::{parse_list, Settings, Value};
use crate::error::CliError;

/// Open `path` for writing, `-` meaning `stdout`.
fn with_output<F>(path: &str, stdout: &mut dyn Write, f: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> Result<(), CliError>,
{
    if path == "-" {
        return f(stdout);
    }
    let io = |source| CliError::Io {
        path: path.into(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    f(&mut w)?;
    w.flush().map_err(io)
}

fn stdout_err(e: std::io::Error) -> CliError {
    CliError::Io {
        path: "-".into(),
        source: e,
    }
}

fn pool(settings: &Settings) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(settings.u64("sim.jobs") as usize)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))
}

fn run_all(settings: &Settings, configs: Vec<SimConfig>) -> Result<Vec<SimStats>, CliError> {
    pool(settings)?.install(|| {
        configs
            .par_iter()
            .map(|c| run(c).map_err(CliError::from))
            .collect()
    })
}

pub fn cmd_run(settings: &Settings, stdout: &mut dyn Write) -> Result<(), CliError> {
    let config = settings.sim_config()?;
    let mut stats = run(&config)?;
    let format: ReportFormat = settings
        .str("report.format")
        .parse()
        .map_err(CliError::Usage)?;
    let log_path = settings.str("report.action_log");
    if let Some(actions) = stats.actions.take() {
        with_output(log_path, stdout, |w| {
            let io = |e| CliError::Io {
                path: log_path.into(),
                source: e,
            };
            writeln!(w, "cycle,bank,action,detail").map_err(io)?;
            for a in &actions {
                writeln!(w, "{a}").map_err(io)?;
            }
            Ok(())
        })?;
    }
    with_output(settings.str("report.output"), stdout, |w| {
        Ok(emit_report(w, std::slice::from_ref(&stats), format)?)
    })
}

fn ratio(x: f64, base: f64) -> f64 {
    if x == base {
        1.0
    } else {
        x / base
    }
}

pub const COMPARE_EXTRA_COLUMNS: [&str; 3] = ["exec_time_norm", "mttf_norm", "overhead_norm"];

pub fn cmd_compare(settings: &Settings, stdout: &mut dyn Write) -> Result<(), CliError> {
    let base = settings.sim_config()?;
    let configs = Policy::ALL
        .iter()
        .map(|&p| {
            let mut c = base.clone();
            c.scheduler.policy = p;
            c
        })
        .collect();
    let rows: Vec<ReportRow> = run_all(settings, configs)?
        .iter()
        .map(ReportRow::from_stats)
        .collect();
    let b = &rows[0];
    with_output(settings.str("report.output"), stdout, |w| {
        let mut out = csv::Writer::from_writer(w);
        let header = REPORT_COLUMNS.iter().chain(&COMPARE_EXTRA_COLUMNS);
        out.write_record(header).map_err(csv_err)?;
        for r in &rows {
            let mut fields = r.fields();
            fields.push(ratio(r.exec_time_ns, b.exec_time_ns).to_string());
            fields.push(ratio(r.mttf_est, b.mttf_est).to_string());
            fields.push(ratio(r.destress_overhead, b.destress_overhead).to_string());
            out.write_record(fields).map_err(csv_err)?;
        }
        out.flush().map_err(stdout_err)
    })
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Usage(format!("CSV output failed: {e}"))
}

pub fn cmd_sweep(settings: &Settings, stdout: &mut dyn Write) -> Result<(), CliError> {
    let axis = settings.str("sweep.axis");
    let values: Vec<f64> = parse_list("sweep.values", settings.str("sweep.values"))?;
    let policies: Vec<Policy> = parse_list("sweep.policies", settings.str("sweep.policies"))?;
    let mut points = Vec::new();
    for &p in &policies {
        for &v in &values {
            let mut s = settings.clone();
            s.set("scheduler.policy", Value::Str(p.name().into()))?;
            match axis {
                "th_aging" => s.set("scheduler.th_aging", Value::Float(v))?,
                "temperature" => s.set("aging.temperature_k", Value::Float(v))?,
                _ => {
                    if v < 1.0 || v.fract() != 0.0 {
                        return Err(CliError::InvalidValue {
                            key: "sweep.values".into(),
                            reason: format!("tdsi must be a positive integer, got {v}"),
                        });
                    }
                    s.set("scheduler.tdsi", Value::Int(v as u64))?
                }
            }
            points.push((p, v, s.sim_config()?));
        }
    }
    let configs = points.iter().map(|(_, _, c)| c.clone()).collect();
    let stats = run_all(settings, configs)?;
    with_output(settings.str("report.output"), stdout, |w| {
        let mut out = csv::Writer::from_writer(w);
        let header = ["axis", "value"].iter().chain(&REPORT_COLUMNS);
        out.write_record(header).map_err(csv_err)?;
        for ((_, v, _), st) in points.iter().zip(&stats) {
            let mut fields = vec![axis.to_string(), v.to_string()];
            fields.extend(ReportRow::from_stats(st).fields());
            out.write_record(fields).map_err(csv_err)?;
        }
        out.flush().map_err(stdout_err)
    })
}

pub fn cmd_gen_trace(settings: &Settings, stdout: &mut dyn Write) -> Result<(), CliError> {
    let config = settings.sim_config()?;
    config.validate()?;
    let spec = settings.generator_spec(&config.geometry)?;
    let mut records = generate(&spec).map_err(nvmsim_core::SimError::from)?;
    if config.write_cache_hit_rate > 0.0 {
        records = write_cache_filter(
            &records,
            config.write_cache_hit_rate,
            config.write_cache_seed,
        )
        .map_err(nvmsim_core::SimError::from)?;
    }
    let out = settings.str("report.output");
    if out == "-" {
        write_trace(stdout, &records).map_err(stdout_err)
    } else {
        nvmsim_core::workload::write_trace_file(Path::new(out), &records)
            .map_err(|e| nvmsim_core::SimError::from(e).into())
    }
}

pub fn cmd_calibrate(
    settings: &Settings,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let config = settings.sim_config()?;
    let tdsi =
        u32::try_from(settings.u64("calibration.tdsi")).map_err(|_| CliError::InvalidValue {
            key: "calibration.tdsi".into(),
            reason: "too large".into(),
        })?;
    let years = settings.f64("calibration.target_years");
    let profile = BaselineProfile::periodic(
        &config.timing,
        tdsi,
        settings.f64("calibration.read_fraction"),
        settings.f64("calibration.utilization"),
    )
    .map_err(nvmsim_core::SimError::from)?;
    let target = years * CYCLES_PER_YEAR_NS / config.timing.clock_ns;
    let params = calibrate(
        target,
        &profile,
        &config.aging,
        &config.voltages,
        &config.recovery,
        config.failure_aging,
    )
    .map_err(nvmsim_core::SimError::from)?;
    let check = estimate_profile_mttf(
        &profile,
        &params,
        &config.voltages,
        &config.recovery,
        config.failure_aging,
    )
    .map_err(nvmsim_core::SimError::from)?;
    let mut out = settings.clone();
    out.set(
        "aging.material_constant",
        Value::Float(params.material_constant),
    )?;
    out.set("report.output", Value::Str("-".into()))?;
    writeln!(
        stderr,
        "material_constant = {:e}; baseline profile MTTF = {:.6} years (target {years})",
        params.material_constant,
        check * config.timing.clock_ns / CYCLES_PER_YEAR_NS
    )
    .map_err(stdout_err)?;
    with_output(settings.str("report.output"), stdout, |w| {
        w.write_all(out.to_toml().as_bytes()).map_err(stdout_err)
    })
}
