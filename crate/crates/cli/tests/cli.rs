use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nvmsim_cli::{resolve, Cli, SCHEMA};

fn nvmsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nvmsim"))
        .args(args)
        .env_remove("NVMSIM_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(
        o.status.success(),
        "failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn repo_file(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
}

/// Column `name` of every data row of a CSV report.
fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    lines
        .map(|l| l.split(',').nth(i).unwrap().to_string())
        .collect()
}

const SMALL: [&str; 2] = ["--set", "workload.requests=500"];

#[test]
fn help_lists_every_config_key() {
    for cmd in [
        vec!["--help"],
        vec!["run", "--help"],
        vec!["sweep", "--help"],
    ] {
        let text = stdout(&nvmsim(&cmd));
        for key in SCHEMA {
            assert!(text.contains(key.name), "{cmd:?} help lacks {}", key.name);
        }
    }
}

#[test]
fn unknown_key_suggests_the_nearest() {
    let o = nvmsim(&["run", "--set", "sched.polcy=laser"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("did you mean `scheduler.policy`"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn unknown_key_in_config_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "[scheduler]\nth_agin = 5.0\n").unwrap();
    let o = nvmsim(&["run", "-c", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("scheduler.th_aging"), "{}", stderr(&o));
}

#[test]
fn invalid_values_exit_with_usage_error() {
    for set in [
        "scheduler.policy=fifo",
        "scheduler.tdsi=-3",
        "sim.check_invariants=maybe",
    ] {
        let o = nvmsim(&["run", "--set", set]);
        assert_eq!(o.status.code(), Some(2), "{set}");
    }
}

#[test]
fn flags_beat_set_beats_config_beats_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.cfg");
    std::fs::write(
        &cfg,
        "[scheduler]\npolicy = \"laser\"\nth_aging = 700.0\n[workload]\nseed = 5\nrequests = 10\n",
    )
    .unwrap();
    let parse = |extra: &[&str]| {
        let mut args = vec!["nvmsim", "run", "-c", cfg.to_str().unwrap()];
        args.extend_from_slice(extra);
        let cli = <Cli as clap::Parser>::try_parse_from(args).unwrap();
        match cli.command {
            nvmsim_cli::Command::Run { common, .. } => resolve(&common).unwrap(),
            _ => unreachable!(),
        }
    };
    let s = parse(&[]);
    assert_eq!(s.str("scheduler.policy"), "laser");
    assert_eq!(s.f64("scheduler.th_aging"), 700.0);
    assert_eq!(s.u64("scheduler.tdsi"), 100);

    let s = parse(&[
        "--set",
        "scheduler.policy=decoupled-laser",
        "--set",
        "workload.seed=6",
    ]);
    assert_eq!(s.str("scheduler.policy"), "decoupled-laser");
    assert_eq!(s.u64("workload.seed"), 6);

    let s = parse(&[
        "--set",
        "scheduler.policy=decoupled-laser",
        "--policy",
        "baseline",
        "--seed",
        "8",
    ]);
    assert_eq!(s.str("scheduler.policy"), "baseline");
    assert_eq!(s.u64("workload.seed"), 8);
    assert_eq!(s.u64("workload.requests"), 10);
}

#[test]
fn config_path_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("env.cfg");
    std::fs::write(
        &cfg,
        "[scheduler]\npolicy = \"decoupled-laser\"\n[workload]\nrequests = 50\n",
    )
    .unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_nvmsim"))
        .arg("run")
        .env("NVMSIM_CONFIG", &cfg)
        .output()
        .unwrap();
    assert_eq!(column(&stdout(&o), "policy"), ["decoupled-laser"]);
}

#[test]
fn output_dash_is_stdout_and_a_path_is_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("r.csv");
    let to_stdout = stdout(&nvmsim(&["run", SMALL[0], SMALL[1], "-o", "-"]));
    let quiet = stdout(&nvmsim(&[
        "run",
        SMALL[0],
        SMALL[1],
        "-o",
        file.to_str().unwrap(),
    ]));
    assert!(quiet.is_empty());
    assert_eq!(std::fs::read_to_string(&file).unwrap(), to_stdout);
}

#[test]
fn missing_trace_file_is_a_usage_error() {
    let o = nvmsim(&["run", "--trace", "/nonexistent/trace.txt"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/nonexistent/trace.txt"));
}

#[test]
fn malformed_trace_reports_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.txt");
    std::fs::write(&trace, "0 R 0x0\n5 X 0x40\n").unwrap();
    let o = nvmsim(&["run", "--trace", trace.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn runs_are_reproducible_across_processes() {
    let args = [
        "run", "--seed", "3", "--policy", "laser", SMALL[0], SMALL[1],
    ];
    assert_eq!(stdout(&nvmsim(&args)), stdout(&nvmsim(&args)));
}

#[test]
fn text_report_names_the_metrics() {
    let text = stdout(&nvmsim(&["run", SMALL[0], SMALL[1], "--format", "text"]));
    for word in ["policy", "mttf_est", "destress_overhead"] {
        assert!(text.contains(word), "{text}");
    }
}

#[test]
fn compare_reports_all_policies_normalized_to_baseline() {
    let out = stdout(&nvmsim(&["compare", SMALL[0], SMALL[1]]));
    assert_eq!(
        column(&out, "policy"),
        ["baseline", "laser", "decoupled-laser"]
    );
    assert_eq!(column(&out, "exec_time_norm")[0], "1");
    assert_eq!(column(&out, "mttf_norm")[0], "1");
}

#[test]
fn sweep_rows_follow_policy_then_value_order() {
    let out = stdout(&nvmsim(&[
        "sweep",
        SMALL[0],
        SMALL[1],
        "--axis",
        "tdsi",
        "--values",
        "50,100",
        "--policies",
        "laser,baseline",
    ]));
    assert_eq!(
        column(&out, "policy"),
        ["laser", "laser", "baseline", "baseline"]
    );
    assert_eq!(column(&out, "value"), ["50", "100", "50", "100"]);
    assert!(column(&out, "axis").iter().all(|a| a == "tdsi"));
}

#[test]
fn sweep_rejects_fractional_tdsi() {
    let o = nvmsim(&["sweep", "--axis", "tdsi", "--values", "2.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn generated_trace_replays_to_the_same_run() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("g.txt.gz");
    let common = [
        "--seed",
        "11",
        "--set",
        "workload.kind=mixed",
        SMALL[0],
        SMALL[1],
    ];
    let mut gen = vec!["gen-trace", "-o", trace.to_str().unwrap()];
    gen.extend_from_slice(&common);
    stdout(&nvmsim(&gen));

    let mut direct = vec!["run", "--policy", "laser"];
    direct.extend_from_slice(&common);
    let replay = [
        "run",
        "--policy",
        "laser",
        "--trace",
        trace.to_str().unwrap(),
    ];
    let (a, b) = (stdout(&nvmsim(&direct)), stdout(&nvmsim(&replay)));
    for col in ["cycles", "mttf_est", "destress_count", "max_aging"] {
        assert_eq!(column(&a, col), column(&b, col), "{col}");
    }
}

fn calibrated_constant(extra: &[&str]) -> f64 {
    let mut args = vec!["calibrate"];
    args.extend_from_slice(extra);
    let doc: toml::Table = stdout(&nvmsim(&args)).parse().unwrap();
    doc["aging"]["material_constant"].as_float().unwrap()
}

#[test]
fn calibrated_config_loads_and_hits_the_target() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cal.cfg");
    let o = nvmsim(&[
        "calibrate",
        "--target-years",
        "2",
        "-o",
        cfg.to_str().unwrap(),
    ]);
    assert!(stderr(&o).contains("2.000000 years"), "{}", stderr(&o));
    let again = nvmsim(&["calibrate", "-c", cfg.to_str().unwrap()]);
    assert!(stderr(&again).contains("2.000000 years"));
    stdout(&nvmsim(&[
        "run",
        "-c",
        cfg.to_str().unwrap(),
        SMALL[0],
        SMALL[1],
    ]));
}

#[test]
fn doubling_the_target_doubles_the_constant_without_a_capacity() {
    let inf = ["--set", "aging.recoverable_capacity=inf"];
    let two = calibrated_constant(&[&["--target-years", "2"][..], &inf].concat());
    let four = calibrated_constant(&[&["--target-years", "4"][..], &inf].concat());
    assert!((four / two - 2.0).abs() < 1e-12, "{two} {four}");
}

#[test]
fn zero_duty_profile_cannot_be_calibrated() {
    let o = nvmsim(&["calibrate", "--set", "calibration.utilization=0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("utilization"));
}

#[test]
fn bundled_configs_load() {
    for name in ["configs/paper-defaults.cfg", "configs/desk-scale.cfg"] {
        let cfg = repo_file(name);
        let out = stdout(&nvmsim(&[
            "run",
            "-c",
            cfg.to_str().unwrap(),
            SMALL[0],
            SMALL[1],
        ]));
        assert_eq!(column(&out, "cycles").len(), 1, "{name}");
    }
}

#[test]
fn help_matches_golden() {
    let want = std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/help.txt"),
    )
    .unwrap();
    assert_eq!(stdout(&nvmsim(&["--help"])), want);
}

fn norms(out: &str, policy: &str, col: &str) -> f64 {
    let row = column(out, "policy")
        .iter()
        .position(|p| p == policy)
        .unwrap();
    column(out, col)[row].parse().unwrap()
}

#[test]
fn compare_directions_on_small_workloads() {
    let micro = stdout(&nvmsim(&["compare", "--set", "workload.requests=10000"]));
    assert!(
        norms(&micro, "decoupled-laser", "overhead_norm")
            <= norms(&micro, "laser", "overhead_norm")
    );
    let writes = stdout(&nvmsim(&[
        "compare",
        "--set",
        "workload.kind=write-heavy",
        "--set",
        "workload.requests=10000",
    ]));
    assert!(norms(&writes, "laser", "mttf_norm") >= 1.0);
    let mixed = stdout(&nvmsim(&[
        "compare",
        "--set",
        "workload.kind=mixed",
        "--set",
        "workload.requests=20000",
    ]));
    assert!(norms(&mixed, "laser", "exec_time_norm") <= 1.0);
}

#[test]
fn temperature_and_tdsi_sweeps_move_aging_up() {
    let max_aging = |axis: &str, values: &str| -> Vec<f64> {
        let out = stdout(&nvmsim(&[
            "sweep",
            "--axis",
            axis,
            "--values",
            values,
            "--policies",
            "baseline",
            "--set",
            "workload.requests=5000",
        ]));
        column(&out, "max_aging")
            .iter()
            .map(|v| v.parse().unwrap())
            .collect()
    };
    let t = max_aging("temperature", "300,325,350");
    assert!(t[0] < t[1] && t[1] < t[2], "{t:?}");
    let d = max_aging("tdsi", "10,100");
    assert!(d[0] < d[1], "{d:?}");
}
