use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_brusselator"));
    c.env_remove("BRUSSELATOR_THREADS");
    c
}

fn run(args: &[&str], cwd: &Path) -> Output {
    bin().args(args).current_dir(cwd).output().expect("binary runs")
}

fn ok(args: &[&str], cwd: &Path) -> String {
    let out = run(args, cwd);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["bogus"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["simulate", "--params", "fig3_1"], dir.path()).status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["spectrum", "--input", "missing"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    let out = run(&["analyze", "--params", "no_such_preset"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn analyze_reports_thresholds() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(&["--json", "analyze", "--params", "fig3_1"], dir.path());
    let v: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
    assert!((v["b_turing"].as_f64().unwrap() - 5.3028).abs() < 1e-3);
    assert_eq!(v["criticality"], "supercritical");
}

#[test]
fn analyze_sweep_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        &["analyze", "--params", "fig2_2", "--x", "1,4,4", "--y", "2,12,3", "--out", "s.csv"],
        dir.path(),
    );
    let csv = fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 12);
    let m: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("s.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["outputs"][0], "s.csv");
    assert_eq!(m["config"]["params"]["n"], 2.0);
}

#[test]
fn coefficients_feed_the_amplitude_command() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["coeffs", "--params", "fig3_1", "--out", "sl.json"], dir.path());
    let text = ok(&["--json", "amplitude", "--model", "sl.json", "--task", "equilibria"], dir.path());
    let eqs: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
    assert!(eqs.as_array().unwrap().iter().any(|e| e["stability"] == "stable"));

    ok(&["coeffs", "--params", "fig3_3", "--kind", "quintic", "--out", "q.json"], dir.path());
    ok(&["amplitude", "--model", "q.json", "--task", "diagram", "--out", "d.csv"], dir.path());
    let d = fs::read_to_string(dir.path().join("d.csv")).unwrap();
    assert!(d.lines().any(|l| l.starts_with("upper")));
}

#[test]
fn simulation_outputs_are_deterministic_and_analysable() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &'static str| {
        vec!["simulate", "--params", "fig3_1", "--ic", "random", "--seed", "7", "--tend", "4", "--snap-every", "2", "--out", out]
    };
    ok(&args("a"), dir.path());
    ok(&args("b"), dir.path());
    for name in ["snap_00002_u.f64", "snap_00002_v.f64", "final.csv"] {
        let a = fs::read(dir.path().join("a").join(name)).unwrap();
        let b = fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
    let m: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("a/manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 7);

    let text = ok(&["--json", "spectrum", "--input", "a", "--out", "spec.csv"], dir.path());
    let v: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
    assert_eq!(v["t"], 4.0);
    assert!(dir.path().join("spec.csv").exists());
    // Spectrum output next to the run must not replace the run's manifest.
    ok(&["spectrum", "--input", "a", "--out", "a/spec.csv"], dir.path());
    let m2: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("a/manifest.json")).unwrap()).unwrap();
    assert_eq!(m2["command"][1], "simulate");

    ok(&["envelope", "--input", "a", "--level", "0.01", "--out", "env"], dir.path());
    assert!(dir.path().join("env/envelopes.csv").exists());
}

#[test]
fn validate_threshold_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(&["validate", "--suite", "thresholds", "--strict", "--out", "v.json"], dir.path());
    let lines: Vec<&str> = out.lines().filter(|l| l.starts_with("criterion")).collect();
    assert_eq!(lines.len(), 4);
    assert!(lines.iter().all(|l| l.contains("PASS")));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("v.json")).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 4);
    assert_eq!(run(&["validate", "--criteria", "14"], dir.path()).status.code(), Some(2));
}
