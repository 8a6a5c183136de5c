use std::path::{Path, PathBuf};
use std::process::Command as Process;

use curlforce_cli::{execute, CliError, Command, Context, FigureKind, Format, RunConfig};
use curlforce_core::Variant;
use serde_json::Value;

fn config(name: &str) -> RunConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    RunConfig::load(&path).unwrap()
}

fn ctx(dir: &Path) -> Context {
    Context {
        out_dir: dir.to_path_buf(),
        ..Context::default()
    }
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn every_demo_config_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        (Command::Simulate, "lrr.json", 0),
        (Command::Simulate, "free_particle.json", 0),
        (Command::Simulate, "crash.json", 2),
        (Command::MapEf, "map_ef_m5.json", 0),
        (Command::MapEf, "map_ef_m7.json", 0),
        (Command::MapEf, "map_ef_drag.json", 0),
        (Command::MapEf, "map_ef_drag_derived.json", 0),
        (Command::Noether, "noether_g2.json", 0),
        (Command::Noether, "noether_g1.json", 0),
        (Command::Noether, "noether_m7.json", 0),
        (Command::Orbit, "orbit_mu0.json", 0),
        (Command::Orbit, "orbit_mu_m4.json", 0),
        (Command::Orbit, "orbit_nonreal.json", 1),
        (Command::Special, "special_exp.json", 0),
        (Command::Special, "special_power.json", 0),
        (Command::Special, "special_control.json", 0),
        (Command::Sweep, "sweep.json", 0),
    ];
    for (command, name, code) in cases {
        let out = tmp.path().join(name);
        let got = execute(command, &config(name), &ctx(&out)).map_or_else(|e| e.exit_code(), |_| 0);
        assert_eq!(got, code, "{name}");
        if code != 1 {
            assert!(out.join("manifest.json").exists(), "{name} left no manifest");
        }
    }
}

#[test]
fn g1_is_flagged_in_the_report() {
    let tmp = tempfile::tempdir().unwrap();
    execute(Command::Noether, &config("noether_g1.json"), &ctx(tmp.path())).unwrap();
    let report = &manifest(tmp.path())["reports"]["noether"];
    assert_eq!(report["noetherian"], false);
    assert!(report["warning"].is_string());
}

#[test]
fn variant_flag_overrides_config_and_is_recorded() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = config("sweep.json").sweep.unwrap().runs[0].config.clone();
    cfg.variant = Some(Variant::Derived);
    let context = Context {
        variant: Some(Variant::AsPrinted),
        which: Some(FigureKind::Fig1),
        ..ctx(tmp.path())
    };
    execute(Command::Figure, &cfg, &context).unwrap();
    let m = manifest(tmp.path());
    assert_eq!(m["effective"]["variant"], "as_printed");
    assert_eq!(m["reports"]["figure"]["variant"], "as_printed");
}

#[test]
fn json_format_writes_json_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let context = Context {
        format: Format::Json,
        ..ctx(tmp.path())
    };
    execute(Command::MapEf, &config("map_ef_m5.json"), &context).unwrap();
    let text = std::fs::read_to_string(tmp.path().join("ef.json")).unwrap();
    let table: Value = serde_json::from_str(&text).unwrap();
    assert!(table.is_object() || table.is_array());
    assert!(!tmp.path().join("ef.csv").exists());
}

#[test]
fn step_cap_turns_into_numerical_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let context = Context {
        max_steps: Some(10),
        ..ctx(tmp.path())
    };
    let err = execute(Command::Simulate, &config("lrr.json"), &context).unwrap_err();
    assert!(matches!(err, CliError::Numerical(_)), "{err}");
    assert_eq!(manifest(tmp.path())["status"], "numerical-failure");
}

#[test]
fn sweep_reports_worst_exit_code_and_keeps_order() {
    let tmp = tempfile::tempdir().unwrap();
    let text = r#"{
        "name": "mixed",
        "sweep": {"workers": 2, "runs": [
            {"command": "special", "config": {"name": "ok", "special": {"lambda": 1.0}}},
            {"command": "special", "config": {"name": "noroot", "special": {"lambda": -0.5}}},
            {"command": "special", "config": {"name": "zero", "special": {"lambda": 0.0}}}
        ]}
    }"#;
    let cfg = RunConfig::from_json(text).unwrap();
    let err = execute(Command::Sweep, &cfg, &ctx(tmp.path())).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    let m = manifest(tmp.path());
    let entries = m["reports"]["sweep"].as_array().unwrap();
    let codes: Vec<i64> = entries.iter().map(|e| e["exit_code"].as_i64().unwrap()).collect();
    assert_eq!(codes, [0, 2, 1]);
    assert_eq!(m["status"], "numerical-failure");
}

#[test]
fn nested_sweep_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let text = r#"{"sweep": {"runs": [{"command": "sweep", "config": {}}]}}"#;
    let err = execute(Command::Sweep, &RunConfig::from_json(text).unwrap(), &ctx(tmp.path())).unwrap_err();
    assert_eq!(err.exit_code(), 1);
}

fn binary(args: &[&str], env: Option<(&str, &str)>) -> (i32, String) {
    let mut cmd = Process::new(env!("CARGO_BIN_EXE_curlforce"));
    cmd.args(args);
    if let Some((k, v)) = env {
        cmd.env(k, v);
    }
    let out = cmd.output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn bad_step_cap_in_environment_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out: PathBuf = tmp.path().join("out");
    let (code, stderr) = binary(
        &["figure", "--out", out.to_str().unwrap()],
        Some((curlforce_cli::MAX_STEPS_ENV, "lots")),
    );
    assert_eq!(code, 1);
    assert!(stderr.contains(curlforce_cli::MAX_STEPS_ENV), "{stderr}");
}

#[test]
fn help_exits_zero() {
    assert_eq!(binary(&["--help"], None).0, 0);
    assert_eq!(binary(&["figure", "--help"], None).0, 0);
}
