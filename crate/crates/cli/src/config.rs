//! Configuration schema, file parsing and `--set` overrides.
//!
//! Config files are TOML: one table per section, keys as listed in
//! [`SCHEMA`]. Values resolve as defaults, then the config file, then
//! `--set` overrides, then dedicated command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use nvmsim_core::aging::{AgingParams, RecoveryPolicy};
use nvmsim_core::controller::{Policy, SchedulerConfig};
use nvmsim_core::memory::{MemoryGeometry, TimingParams, VoltageTable};
use nvmsim_core::sim::{SimConfig, Workload};
use nvmsim_core::workload::{GeneratorKind, GeneratorSpec, InterArrival, Phase};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(u64),
    Float(f64),
    Bool(bool),
    Str(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Float(v) => write!(f, "{v}"),
            Value::Bool(v) => write!(f, "{v}"),
            Value::Str(v) => f.write_str(v),
        }
    }
}

impl Value {
    /// TOML literal for this value.
    fn to_toml(&self) -> String {
        match self {
            Value::Float(v) if v.is_infinite() => "inf".into(),
            Value::Float(v) => format!("{v:?}"),
            Value::Str(s) => toml::Value::String(s.clone()).to_string(),
            other => other.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    UInt,
    Float,
    Bool,
    Str,
    Choice(&'static [&'static str]),
}

impl Kind {
    fn describe(&self) -> String {
        match self {
            Kind::UInt => "integer".into(),
            Kind::Float => "number".into(),
            Kind::Bool => "true|false".into(),
            Kind::Str => "string".into(),
            Kind::Choice(c) => c.join("|"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Key {
    pub name: &'static str,
    pub kind: Kind,
    pub help: &'static str,
}

const POLICIES: &[&str] = &["baseline", "laser", "decoupled-laser"];
const WORKLOADS: &[&str] = &[
    "microbenchmark",
    "uniform",
    "read-heavy",
    "write-heavy",
    "scripted",
    "mixed",
];

macro_rules! key {
    ($name:literal, $kind:expr, $help:literal) => {
        Key {
            name: $name,
            kind: $kind,
            help: $help,
        }
    };
}

pub const SCHEMA: &[Key] = &[
    key!("geometry.channels", Kind::UInt, "memory channels"),
    key!(
        "geometry.ranks_per_channel",
        Kind::UInt,
        "ranks per channel"
    ),
    key!("geometry.banks_per_rank", Kind::UInt, "banks per rank"),
    key!(
        "geometry.partitions_per_bank",
        Kind::UInt,
        "partitions per bank"
    ),
    key!(
        "geometry.capacity_bytes",
        Kind::UInt,
        "total capacity in bytes"
    ),
    key!("geometry.line_bytes", Kind::UInt, "bytes per access"),
    key!(
        "timing.clock_ns",
        Kind::Float,
        "controller clock period (ns)"
    ),
    key!(
        "timing.read_trc_ns",
        Kind::Float,
        "read row cycle time (ns)"
    ),
    key!(
        "timing.write_trc_ns",
        Kind::Float,
        "write row cycle time (ns)"
    ),
    key!(
        "timing.verify_ns",
        Kind::Float,
        "verify step at the end of a write (ns)"
    ),
    key!(
        "timing.tdsc",
        Kind::UInt,
        "de-stress length in de-stress cycles"
    ),
    key!(
        "timing.destress_cycle_ns",
        Kind::Float,
        "length of one de-stress cycle (ns)"
    ),
    key!(
        "voltage.read_ps",
        Kind::Float,
        "pulse shaper supply during reads (V)"
    ),
    key!(
        "voltage.read_vr",
        Kind::Float,
        "verify logic supply during reads (V)"
    ),
    key!(
        "voltage.read_sa",
        Kind::Float,
        "sense amplifier supply during reads (V)"
    ),
    key!(
        "voltage.write_ps",
        Kind::Float,
        "pulse shaper supply during writes (V)"
    ),
    key!(
        "voltage.write_vr",
        Kind::Float,
        "verify logic supply during writes (V)"
    ),
    key!(
        "voltage.write_sa",
        Kind::Float,
        "sense amplifier supply during writes (V)"
    ),
    key!(
        "voltage.idle_ps",
        Kind::Float,
        "pulse shaper supply when idle (V)"
    ),
    key!(
        "voltage.idle_vr",
        Kind::Float,
        "verify logic supply when idle (V)"
    ),
    key!(
        "voltage.idle_sa",
        Kind::Float,
        "sense amplifier supply when idle (V)"
    ),
    key!(
        "voltage.destress",
        Kind::Float,
        "supply while de-stressing (V)"
    ),
    key!(
        "aging.material_constant",
        Kind::Float,
        "lifetime constant A (cycles V^gamma)"
    ),
    key!(
        "aging.voltage_exponent",
        Kind::Float,
        "voltage exponent gamma"
    ),
    key!(
        "aging.activation_energy_ev",
        Kind::Float,
        "activation energy (eV)"
    ),
    key!("aging.temperature_k", Kind::Float, "temperature (K)"),
    key!("aging.weibull_beta", Kind::Float, "Weibull slope beta"),
    key!("aging.vth", Kind::Float, "transistor threshold voltage (V)"),
    key!(
        "aging.use_operating_voltage",
        Kind::Bool,
        "stress with the supply instead of the overdrive voltage"
    ),
    key!(
        "aging.kappa",
        Kind::Float,
        "share of recoverable aging left permanent by a de-stress"
    ),
    key!(
        "aging.recoverable_capacity",
        Kind::Float,
        "recoverable aging ceiling (inf disables)"
    ),
    key!(
        "aging.failure_aging",
        Kind::Float,
        "permanent aging at which a block fails"
    ),
    key!(
        "scheduler.policy",
        Kind::Choice(POLICIES),
        "scheduling policy"
    ),
    key!(
        "scheduler.tdsi",
        Kind::UInt,
        "baseline de-stress interval (requests)"
    ),
    key!(
        "scheduler.th_aging",
        Kind::Float,
        "aging threshold (aging units)"
    ),
    key!("scheduler.th_idle", Kind::UInt, "idle threshold (cycles)"),
    key!(
        "scheduler.th_backlog",
        Kind::UInt,
        "backlog threshold (cycles)"
    ),
    key!(
        "scheduler.queue_capacity",
        Kind::UInt,
        "request queue entries"
    ),
    key!(
        "scheduler.background_sweep",
        Kind::Bool,
        "de-stress idle banks that crossed a threshold"
    ),
    key!(
        "workload.trace",
        Kind::Str,
        "trace file to replay instead of a generator"
    ),
    key!(
        "workload.kind",
        Kind::Choice(WORKLOADS),
        "synthetic generator"
    ),
    key!("workload.requests", Kind::UInt, "generated request count"),
    key!("workload.seed", Kind::UInt, "generator seed"),
    key!(
        "workload.read_fraction",
        Kind::Float,
        "read share for the uniform generator"
    ),
    key!(
        "workload.arrival",
        Kind::Choice(&["fixed", "geometric"]),
        "inter-arrival distribution"
    ),
    key!(
        "workload.mean_gap",
        Kind::Float,
        "mean inter-arrival gap (cycles)"
    ),
    key!(
        "workload.phases",
        Kind::Str,
        "scripted phases as requests:read_fraction,..."
    ),
    key!(
        "workload.write_cache_hit_rate",
        Kind::Float,
        "share of requests absorbed by the write cache"
    ),
    key!("workload.cache_seed", Kind::UInt, "write cache filter seed"),
    key!(
        "workload.label",
        Kind::Str,
        "workload name in reports (empty: derived)"
    ),
    key!(
        "sim.max_cycles",
        Kind::UInt,
        "stop after this many cycles (0: run to drain)"
    ),
    key!(
        "sim.sample_interval",
        Kind::UInt,
        "aging sample interval (cycles)"
    ),
    key!(
        "sim.check_invariants",
        Kind::Bool,
        "check controller invariants every cycle"
    ),
    key!(
        "sim.jobs",
        Kind::UInt,
        "parallel simulations (0: all cores)"
    ),
    key!(
        "report.format",
        Kind::Choice(&["csv", "text"]),
        "report format for run"
    ),
    key!("report.output", Kind::Str, "output path (-: stdout)"),
    key!(
        "report.action_log",
        Kind::Str,
        "write the controller action log here"
    ),
    key!(
        "sweep.axis",
        Kind::Choice(&["th_aging", "tdsi", "temperature"]),
        "swept parameter"
    ),
    key!("sweep.values", Kind::Str, "comma-separated sweep values"),
    key!(
        "sweep.policies",
        Kind::Str,
        "comma-separated policies to sweep"
    ),
    key!(
        "calibration.target_years",
        Kind::Float,
        "target baseline MTTF (years)"
    ),
    key!(
        "calibration.tdsi",
        Kind::UInt,
        "de-stress interval of the calibration profile"
    ),
    key!(
        "calibration.read_fraction",
        Kind::Float,
        "read share of the calibration profile"
    ),
    key!(
        "calibration.utilization",
        Kind::Float,
        "busy share of the calibration profile"
    ),
];

pub fn lookup(name: &str) -> Result<&'static Key, CliError> {
    SCHEMA
        .iter()
        .find(|k| k.name == name)
        .ok_or_else(|| CliError::UnknownKey {
            key: name.to_string(),
            suggestion: suggest(name),
        })
}

fn suggest(name: &str) -> Option<String> {
    SCHEMA
        .iter()
        .map(|k| (strsim::jaro_winkler(name, k.name), k.name))
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .filter(|(score, _)| *score > 0.6)
        .map(|(_, n)| n.to_string())
}

/// Schema listing used in `--help`.
pub fn schema_help() -> String {
    let width = SCHEMA.iter().map(|k| k.name.len()).max().unwrap_or(0);
    let defaults = Settings::default();
    let mut out =
        String::from("Config keys (config file section.key, or --set section.key=value):\n");
    for k in SCHEMA {
        out.push_str(&format!(
            "  {:width$}  {} [{}; default: {}]\n",
            k.name,
            k.help,
            k.kind.describe(),
            defaults.values[k.name].to_toml(),
        ));
    }
    out
}

fn invalid(key: &str, reason: impl Into<String>) -> CliError {
    CliError::InvalidValue {
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn check_choice(key: &Key, s: &str) -> Result<(), CliError> {
    if let Kind::Choice(choices) = key.kind {
        if !choices.contains(&s) {
            return Err(invalid(
                key.name,
                format!("expected one of {}, got {s:?}", choices.join(", ")),
            ));
        }
    }
    Ok(())
}

/// Parse a `--set` value according to the key's type.
pub fn parse_value(key: &Key, raw: &str) -> Result<Value, CliError> {
    let raw = raw.trim();
    match key.kind {
        Kind::UInt => raw
            .replace('_', "")
            .parse::<u64>()
            .map(Value::Int)
            .map_err(|e| invalid(key.name, format!("{raw:?}: {e}"))),
        Kind::Float => raw
            .replace('_', "")
            .parse::<f64>()
            .map(Value::Float)
            .map_err(|e| invalid(key.name, format!("{raw:?}: {e}"))),
        Kind::Bool => raw
            .parse::<bool>()
            .map(Value::Bool)
            .map_err(|_| invalid(key.name, format!("expected true or false, got {raw:?}"))),
        Kind::Str | Kind::Choice(_) => {
            check_choice(key, raw)?;
            Ok(Value::Str(raw.to_string()))
        }
    }
}

fn from_toml(key: &Key, v: &toml::Value) -> Result<Value, CliError> {
    let mismatch = || {
        invalid(
            key.name,
            format!("expected {}, got {v}", key.kind.describe()),
        )
    };
    match (key.kind, v) {
        (Kind::UInt, toml::Value::Integer(i)) if *i >= 0 => Ok(Value::Int(*i as u64)),
        (Kind::Float, toml::Value::Integer(i)) => Ok(Value::Float(*i as f64)),
        (Kind::Float, toml::Value::Float(f)) => Ok(Value::Float(*f)),
        (Kind::Bool, toml::Value::Boolean(b)) => Ok(Value::Bool(*b)),
        (Kind::Str | Kind::Choice(_), toml::Value::String(s)) => {
            check_choice(key, s)?;
            Ok(Value::Str(s.clone()))
        }
        _ => Err(mismatch()),
    }
}

/// Resolved value for every schema key.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    values: BTreeMap<&'static str, Value>,
}

impl Default for Settings {
    fn default() -> Self {
        let geo = MemoryGeometry::default();
        let t = TimingParams::default();
        let v = VoltageTable::default();
        let a = AgingParams::default();
        let r = RecoveryPolicy::default();
        let s = SchedulerConfig::default();
        let g = GeneratorSpec::default();
        let sim = SimConfig::default();
        let (f, i, b, st) = (Value::Float, Value::Int, Value::Bool, |x: &str| {
            Value::Str(x.to_string())
        });
        let pairs = [
            ("geometry.channels", i(geo.channels)),
            ("geometry.ranks_per_channel", i(geo.ranks_per_channel)),
            ("geometry.banks_per_rank", i(geo.banks_per_rank)),
            ("geometry.partitions_per_bank", i(geo.partitions_per_bank)),
            ("geometry.capacity_bytes", i(geo.capacity_bytes)),
            ("geometry.line_bytes", i(geo.line_bytes)),
            ("timing.clock_ns", f(t.clock_ns)),
            ("timing.read_trc_ns", f(t.read.trc)),
            ("timing.write_trc_ns", f(t.write.trc)),
            ("timing.verify_ns", f(t.verify_ns)),
            ("timing.tdsc", i(t.tdsc as u64)),
            ("timing.destress_cycle_ns", f(t.destress_cycle_ns)),
            ("voltage.read_ps", f(v.read[0])),
            ("voltage.read_vr", f(v.read[1])),
            ("voltage.read_sa", f(v.read[2])),
            ("voltage.write_ps", f(v.write[0])),
            ("voltage.write_vr", f(v.write[1])),
            ("voltage.write_sa", f(v.write[2])),
            ("voltage.idle_ps", f(v.idle[0])),
            ("voltage.idle_vr", f(v.idle[1])),
            ("voltage.idle_sa", f(v.idle[2])),
            ("voltage.destress", f(v.destress)),
            ("aging.material_constant", f(a.material_constant)),
            ("aging.voltage_exponent", f(a.voltage_exponent)),
            ("aging.activation_energy_ev", f(a.activation_energy_ev)),
            ("aging.temperature_k", f(a.temperature_k)),
            ("aging.weibull_beta", f(a.weibull_beta)),
            ("aging.vth", f(a.vth)),
            ("aging.use_operating_voltage", b(a.use_operating_voltage)),
            ("aging.kappa", f(r.kappa)),
            ("aging.recoverable_capacity", f(r.recoverable_capacity)),
            ("aging.failure_aging", f(sim.failure_aging)),
            ("scheduler.policy", st(s.policy.name())),
            ("scheduler.tdsi", i(s.tdsi)),
            ("scheduler.th_aging", f(s.th_aging)),
            ("scheduler.th_idle", i(s.th_idle)),
            ("scheduler.th_backlog", i(s.th_backlog)),
            ("scheduler.queue_capacity", i(s.queue_capacity as u64)),
            ("scheduler.background_sweep", b(s.background_sweep)),
            ("workload.trace", st("")),
            ("workload.kind", st(g.kind.name())),
            ("workload.requests", i(g.request_count)),
            ("workload.seed", i(g.seed)),
            ("workload.read_fraction", f(g.read_fraction)),
            ("workload.arrival", st("fixed")),
            ("workload.mean_gap", f(1.0)),
            ("workload.phases", st("2000:0.95,2000:0.5")),
            ("workload.write_cache_hit_rate", f(sim.write_cache_hit_rate)),
            ("workload.cache_seed", i(sim.write_cache_seed)),
            ("workload.label", st("")),
            ("sim.max_cycles", i(0)),
            ("sim.sample_interval", i(sim.sample_interval)),
            ("sim.check_invariants", b(sim.check_invariants)),
            ("sim.jobs", i(0)),
            ("report.format", st("csv")),
            ("report.output", st("-")),
            ("report.action_log", st("")),
            ("sweep.axis", st("th_aging")),
            ("sweep.values", st("500,1000,2000")),
            ("sweep.policies", st("baseline,laser,decoupled-laser")),
            ("calibration.target_years", f(2.0)),
            ("calibration.tdsi", i(100)),
            ("calibration.read_fraction", f(0.5)),
            ("calibration.utilization", f(1.0)),
        ];
        let values: BTreeMap<_, _> = pairs.into_iter().collect();
        debug_assert_eq!(values.len(), SCHEMA.len());
        Self { values }
    }
}

impl Settings {
    pub fn set(&mut self, name: &str, value: Value) -> Result<(), CliError> {
        let key = lookup(name)?;
        self.values.insert(key.name, value);
        Ok(())
    }

    /// Apply a `key=value` override.
    pub fn apply_override(&mut self, spec: &str) -> Result<(), CliError> {
        let (name, raw) = spec
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("override {spec:?} is not key=value")))?;
        let key = lookup(name.trim())?;
        let v = parse_value(key, raw)?;
        self.values.insert(key.name, v);
        Ok(())
    }

    pub fn merge_toml(&mut self, text: &str, path: &Path) -> Result<(), CliError> {
        let file_err = |reason: String| CliError::ConfigFile {
            path: path.to_path_buf(),
            reason,
        };
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| file_err(e.to_string()))?;
        for (section, body) in &table {
            let toml::Value::Table(body) = body else {
                return Err(lookup(section).err().unwrap_or_else(|| {
                    file_err(format!("`{section}` must be a [section] table"))
                }));
            };
            for (k, v) in body {
                let key = lookup(&format!("{section}.{k}"))?;
                self.values.insert(key.name, from_toml(key, v)?);
            }
        }
        Ok(())
    }

    pub fn load_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.merge_toml(&text, path)
    }

    pub fn get(&self, name: &str) -> &Value {
        &self.values[lookup(name).expect("schema key").name]
    }

    pub fn u64(&self, name: &str) -> u64 {
        match self.get(name) {
            Value::Int(v) => *v,
            other => unreachable!("{name} holds {other:?}"),
        }
    }

    pub fn f64(&self, name: &str) -> f64 {
        match self.get(name) {
            Value::Float(v) => *v,
            other => unreachable!("{name} holds {other:?}"),
        }
    }

    pub fn bool(&self, name: &str) -> bool {
        match self.get(name) {
            Value::Bool(v) => *v,
            other => unreachable!("{name} holds {other:?}"),
        }
    }

    pub fn str(&self, name: &str) -> &str {
        match self.get(name) {
            Value::Str(v) => v,
            other => unreachable!("{name} holds {other:?}"),
        }
    }

    /// Config file text with every key, in schema order.
    pub fn to_toml(&self) -> String {
        let mut out = String::new();
        let mut section = "";
        for k in SCHEMA {
            let (sec, name) = k.name.split_once('.').expect("dotted key");
            if sec != section {
                if !section.is_empty() {
                    out.push('\n');
                }
                out.push_str(&format!("[{sec}]\n"));
                section = sec;
            }
            out.push_str(&format!(
                "# {}\n{name} = {}\n",
                k.help,
                self.values[k.name].to_toml()
            ));
        }
        out
    }

    pub fn policy(&self) -> Policy {
        self.str("scheduler.policy")
            .parse()
            .expect("validated choice")
    }

    pub fn sim_config(&self) -> Result<SimConfig, CliError> {
        let mut timing = TimingParams {
            clock_ns: self.f64("timing.clock_ns"),
            ..TimingParams::default()
        };
        timing.read.trc = self.f64("timing.read_trc_ns");
        timing.write.trc = self.f64("timing.write_trc_ns");
        let (rt, wt) = (timing.read.trc, timing.write.trc);
        for p in [
            &mut timing.read.trcd,
            &mut timing.read.tras,
            &mut timing.read.trp,
        ] {
            *p = p.min(rt);
        }
        for p in [
            &mut timing.write.trcd,
            &mut timing.write.tburst,
            &mut timing.write.twr,
            &mut timing.write.trp,
        ] {
            *p = p.min(wt);
        }
        timing.verify_ns = self.f64("timing.verify_ns");
        timing.tdsc = u32::try_from(self.u64("timing.tdsc"))
            .map_err(|_| invalid("timing.tdsc", "too large"))?;
        timing.destress_cycle_ns = self.f64("timing.destress_cycle_ns");

        let v3 = |mode: &str| ["ps", "vr", "sa"].map(|b| self.f64(&format!("voltage.{mode}_{b}")));
        let voltages = VoltageTable {
            read: v3("read"),
            write: v3("write"),
            idle: v3("idle"),
            destress: self.f64("voltage.destress"),
        };

        let aging = AgingParams {
            material_constant: self.f64("aging.material_constant"),
            voltage_exponent: self.f64("aging.voltage_exponent"),
            activation_energy_ev: self.f64("aging.activation_energy_ev"),
            temperature_k: self.f64("aging.temperature_k"),
            weibull_beta: self.f64("aging.weibull_beta"),
            vth: self.f64("aging.vth"),
            use_operating_voltage: self.bool("aging.use_operating_voltage"),
            ..AgingParams::default()
        };
        let recovery = RecoveryPolicy {
            kappa: self.f64("aging.kappa"),
            recoverable_capacity: self.f64("aging.recoverable_capacity"),
        };
        let geometry = MemoryGeometry {
            channels: self.u64("geometry.channels"),
            ranks_per_channel: self.u64("geometry.ranks_per_channel"),
            banks_per_rank: self.u64("geometry.banks_per_rank"),
            partitions_per_bank: self.u64("geometry.partitions_per_bank"),
            capacity_bytes: self.u64("geometry.capacity_bytes"),
            line_bytes: self.u64("geometry.line_bytes"),
        };
        let scheduler = SchedulerConfig {
            policy: self.policy(),
            tdsi: self.u64("scheduler.tdsi"),
            th_aging: self.f64("scheduler.th_aging"),
            th_idle: self.u64("scheduler.th_idle"),
            th_backlog: self.u64("scheduler.th_backlog"),
            queue_capacity: self.u64("scheduler.queue_capacity") as usize,
            background_sweep: self.bool("scheduler.background_sweep"),
        };
        let label = self.str("workload.label");
        let trace_is_empty = self.str("workload.trace").is_empty();
        let max_cycles = self.u64("sim.max_cycles");
        Ok(SimConfig {
            geometry,
            timing,
            voltages,
            aging,
            recovery,
            failure_aging: self.f64("aging.failure_aging"),
            scheduler,
            workload: self.workload(&geometry)?,
            workload_label: match label {
                "" if trace_is_empty && self.str("workload.kind") == "mixed" => {
                    Some("mixed".into())
                }
                "" => None,
                l => Some(l.to_string()),
            },
            write_cache_hit_rate: self.f64("workload.write_cache_hit_rate"),
            write_cache_seed: self.u64("workload.cache_seed"),
            max_cycles: (max_cycles > 0).then_some(max_cycles),
            sample_interval: self.u64("sim.sample_interval"),
            record_timeline: false,
            record_actions: !self.str("report.action_log").is_empty(),
            check_invariants: self.bool("sim.check_invariants"),
        })
    }

    pub fn generator_spec(&self, geometry: &MemoryGeometry) -> Result<GeneratorSpec, CliError> {
        let kind = self.str("workload.kind");
        let requests = self.u64("workload.requests");
        let seed = self.u64("workload.seed");
        let mut spec = if kind == "mixed" {
            GeneratorSpec::mixed(requests, seed)
        } else {
            let mean = self.f64("workload.mean_gap");
            if !(mean >= 0.0 && mean.is_finite()) {
                return Err(invalid(
                    "workload.mean_gap",
                    format!("must be >= 0, got {mean}"),
                ));
            }
            GeneratorSpec {
                kind: kind
                    .parse::<GeneratorKind>()
                    .map_err(|e| invalid("workload.kind", e))?,
                request_count: requests,
                inter_arrival: match self.str("workload.arrival") {
                    "geometric" => InterArrival::Geometric(mean),
                    _ => InterArrival::Fixed(mean.round() as u64),
                },
                seed,
                read_fraction: self.f64("workload.read_fraction"),
                phases: parse_phases(self.str("workload.phases"))?,
                ..GeneratorSpec::default()
            }
        };
        spec.capacity_bytes = geometry.capacity_bytes;
        spec.line_bytes = geometry.line_bytes;
        spec.validate()
            .map_err(|e| invalid("workload", e.to_string()))?;
        Ok(spec)
    }

    fn workload(&self, geometry: &MemoryGeometry) -> Result<Workload, CliError> {
        let trace = self.str("workload.trace");
        if !trace.is_empty() {
            return Ok(Workload::TraceFile(PathBuf::from(trace)));
        }
        Ok(Workload::Generated(self.generator_spec(geometry)?))
    }
}

pub fn parse_phases(s: &str) -> Result<Vec<Phase>, CliError> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let bad = || {
                invalid(
                    "workload.phases",
                    format!("expected requests:read_fraction, got {p:?}"),
                )
            };
            let (n, f) = p.split_once(':').ok_or_else(bad)?;
            Ok(Phase {
                requests: n.trim().parse().map_err(|_| bad())?,
                read_fraction: f.trim().parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

/// Comma-separated list parsed item by item.
pub fn parse_list<T: std::str::FromStr>(key: &str, s: &str) -> Result<Vec<T>, CliError>
where
    T::Err: fmt::Display,
{
    let items: Vec<T> = s
        .split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| {
            x.parse::<T>()
                .map_err(|e| invalid(key, format!("{x:?}: {e}")))
        })
        .collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err(invalid(key, "list is empty"));
    }
    Ok(items)
}
