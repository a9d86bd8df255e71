use std::io::{Read, Write};

use super::stats::{destress_overhead, estimate_mttf, SimStats};
use super::SimError;

pub const REPORT_COLUMNS: [&str; 10] = [
    "policy",
    "workload",
    "cycles",
    "exec_time_ns",
    "mttf_est",
    "destress_overhead",
    "max_aging",
    "mean_wait",
    "p99_wait",
    "destress_count",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Text,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "text" => Ok(ReportFormat::Text),
            _ => Err(format!("unknown report format {s:?}, expected csv or text")),
        }
    }
}

/// One report line. `mttf_est` is in years, infinite when no permanent
/// aging accrued.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub policy: String,
    pub workload: String,
    pub cycles: u64,
    pub exec_time_ns: f64,
    pub mttf_est: f64,
    pub destress_overhead: f64,
    pub max_aging: f64,
    pub mean_wait: f64,
    pub p99_wait: u64,
    pub destress_count: u64,
}

impl ReportRow {
    pub fn from_stats(stats: &SimStats) -> Self {
        let mttf = estimate_mttf(stats)
            .map(|m| m.years(stats.clock_ns))
            .unwrap_or(f64::INFINITY);
        Self {
            policy: stats.policy.name().to_string(),
            workload: stats.workload.clone(),
            cycles: stats.cycles_elapsed,
            exec_time_ns: stats.exec_time_ns(),
            mttf_est: mttf,
            destress_overhead: destress_overhead(stats).unwrap_or(0.0),
            max_aging: stats.max_aging(),
            mean_wait: stats.waits.mean,
            p99_wait: stats.waits.p99,
            destress_count: stats.destress_count(),
        }
    }

    pub fn fields(&self) -> Vec<String> {
        vec![
            self.policy.clone(),
            self.workload.clone(),
            self.cycles.to_string(),
            self.exec_time_ns.to_string(),
            self.mttf_est.to_string(),
            self.destress_overhead.to_string(),
            self.max_aging.to_string(),
            self.mean_wait.to_string(),
            self.p99_wait.to_string(),
            self.destress_count.to_string(),
        ]
    }

    fn from_fields(rec: &csv::StringRecord) -> Result<Self, SimError> {
        if rec.len() < REPORT_COLUMNS.len() {
            return Err(SimError::Report(format!(
                "expected {} columns, got {}",
                REPORT_COLUMNS.len(),
                rec.len()
            )));
        }
        fn num<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> Result<T, SimError> {
            rec[i].parse().map_err(|_| {
                SimError::Report(format!("bad {} value {:?}", REPORT_COLUMNS[i], &rec[i]))
            })
        }
        Ok(Self {
            policy: rec[0].to_string(),
            workload: rec[1].to_string(),
            cycles: num(rec, 2)?,
            exec_time_ns: num(rec, 3)?,
            mttf_est: num(rec, 4)?,
            destress_overhead: num(rec, 5)?,
            max_aging: num(rec, 6)?,
            mean_wait: num(rec, 7)?,
            p99_wait: num(rec, 8)?,
            destress_count: num(rec, 9)?,
        })
    }
}

fn csv_err(e: csv::Error) -> SimError {
    SimError::Report(e.to_string())
}

/// Write one row per run, header first.
pub fn emit_report<W: Write>(
    out: W,
    stats: &[SimStats],
    format: ReportFormat,
) -> Result<(), SimError> {
    let rows: Vec<_> = stats.iter().map(ReportRow::from_stats).collect();
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(REPORT_COLUMNS).map_err(csv_err)?;
            for r in &rows {
                w.write_record(r.fields()).map_err(csv_err)?;
            }
            w.flush().map_err(|e| SimError::Report(e.to_string()))
        }
        ReportFormat::Text => {
            let mut out = out;
            let io = |e: std::io::Error| SimError::Report(e.to_string());
            for (i, r) in rows.iter().enumerate() {
                if i > 0 {
                    writeln!(out).map_err(io)?;
                }
                for (k, v) in REPORT_COLUMNS.iter().zip(r.fields()) {
                    writeln!(out, "{k:<18} {v}").map_err(io)?;
                }
            }
            out.flush().map_err(io)
        }
    }
}

/// Read back a CSV report written by [`emit_report`].
pub fn parse_report<R: Read>(input: R) -> Result<Vec<ReportRow>, SimError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().take(REPORT_COLUMNS.len()).ne(REPORT_COLUMNS) {
        return Err(SimError::Report(format!("unexpected header {header:?}")));
    }
    r.records()
        .map(|rec| ReportRow::from_fields(&rec.map_err(csv_err)?))
        .collect()
}
