//! Command-line front end for the simulator: config handling and the
//! `run`, `compare`, `sweep`, `gen-trace` and `calibrate` subcommands.

pub mod commands;
pub mod config;
pub mod error;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};

pub use config::{Settings, SCHEMA};
pub use error::CliError;

use config::Value;

#[derive(Debug, Parser)]
#[command(
    name = "nvmsim",
    version,
    about = "Aging-aware PCM main-memory simulator",
    long_about = "Cycle-level simulation of PCM main memory with BTI aging of the per-bank \
                  peripheral circuits, comparing a periodic de-stress baseline, LASER and \
                  Decoupled-LASER scheduling."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Config file (TOML sections); defaults to $NVMSIM_CONFIG when set
    #[arg(short, long, env = "NVMSIM_CONFIG", value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Override a config key, e.g. --set scheduler.policy=laser (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Scheduling policy [scheduler.policy]
    #[arg(long)]
    pub policy: Option<String>,
    /// Workload seed [workload.seed]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Replay this trace file [workload.trace]
    #[arg(long, value_name = "PATH")]
    pub trace: Option<PathBuf>,
    /// Output path, - for stdout [report.output]
    #[arg(short, long, value_name = "PATH")]
    pub output: Option<String>,
    /// Parallel simulations, 0 for all cores [sim.jobs]
    #[arg(short, long)]
    pub jobs: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one simulation and print its report
    Run {
        #[command(flatten)]
        common: Common,
        /// Report format: csv or text [report.format]
        #[arg(long)]
        format: Option<String>,
        /// Write the controller action log to PATH [report.action_log]
        #[arg(long, value_name = "PATH")]
        action_log: Option<String>,
    },
    /// Run baseline, LASER and Decoupled-LASER on one workload
    Compare {
        #[command(flatten)]
        common: Common,
    },
    /// Sweep one parameter across policies
    Sweep {
        #[command(flatten)]
        common: Common,
        /// th_aging, tdsi or temperature [sweep.axis]
        #[arg(long)]
        axis: Option<String>,
        /// Comma-separated values [sweep.values]
        #[arg(long)]
        values: Option<String>,
        /// Comma-separated policies [sweep.policies]
        #[arg(long)]
        policies: Option<String>,
    },
    /// Write a synthetic trace
    GenTrace {
        #[command(flatten)]
        common: Common,
    },
    /// Solve the material constant for a target baseline MTTF and write
    /// the resulting config
    Calibrate {
        #[command(flatten)]
        common: Common,
        /// Target MTTF in years [calibration.target_years]
        #[arg(long)]
        target_years: Option<f64>,
    },
}

pub fn command() -> clap::Command {
    let keys = config::schema_help();
    Cli::command()
        .after_help(keys.clone())
        .mut_subcommands(|sc| sc.after_help(keys.clone()))
}

fn set_str(s: &mut Settings, key: &str, v: Option<String>) -> Result<(), CliError> {
    match v {
        Some(v) => {
            let k = config::lookup(key)?;
            s.set(key, config::parse_value(k, &v)?)
        }
        None => Ok(()),
    }
}

/// Defaults, then the config file, then `--set`, then dedicated flags.
pub fn resolve(common: &Common) -> Result<Settings, CliError> {
    let mut s = Settings::default();
    if let Some(path) = &common.config {
        s.load_file(path)?;
    }
    for o in &common.overrides {
        s.apply_override(o)?;
    }
    set_str(&mut s, "scheduler.policy", common.policy.clone())?;
    set_str(&mut s, "report.output", common.output.clone())?;
    if let Some(seed) = common.seed {
        s.set("workload.seed", Value::Int(seed))?;
    }
    if let Some(jobs) = common.jobs {
        s.set("sim.jobs", Value::Int(jobs))?;
    }
    if let Some(trace) = &common.trace {
        s.set("workload.trace", Value::Str(trace.display().to_string()))?;
    }
    Ok(s)
}

pub fn execute(
    cmd: Command,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    match cmd {
        Command::Run {
            common,
            format,
            action_log,
        } => {
            let mut s = resolve(&common)?;
            set_str(&mut s, "report.format", format)?;
            set_str(&mut s, "report.action_log", action_log)?;
            commands::cmd_run(&s, stdout)
        }
        Command::Compare { common } => commands::cmd_compare(&resolve(&common)?, stdout),
        Command::Sweep {
            common,
            axis,
            values,
            policies,
        } => {
            let mut s = resolve(&common)?;
            set_str(&mut s, "sweep.axis", axis)?;
            set_str(&mut s, "sweep.values", values)?;
            set_str(&mut s, "sweep.policies", policies)?;
            commands::cmd_sweep(&s, stdout)
        }
        Command::GenTrace { common } => commands::cmd_gen_trace(&resolve(&common)?, stdout),
        Command::Calibrate {
            common,
            target_years,
        } => {
            let mut s = resolve(&common)?;
            if let Some(y) = target_years {
                s.set("calibration.target_years", Value::Float(y))?;
            }
            commands::cmd_calibrate(&s, stdout, stderr)
        }
    }
}

/// Parse `args` and run; returns the process exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render();
            let _ = if e.use_stderr() {
                write!(stderr, "{}", text.ansi())
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return 2;
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
