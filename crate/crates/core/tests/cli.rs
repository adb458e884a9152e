//! End-to-end runs of the command-line tool.

use std::fs;
use std::path::Path;
use std::process::Command;

fn tool() -> Command {
    Command::new(env!("CARGO_BIN_EXE_finsler-duality"))
}

fn run_json(args: &[&str], out: &Path) -> (i32, serde_json::Value, Vec<u8>) {
    let status = tool().args(args).arg("--out").arg(out).output().unwrap();
    let bytes = fs::read(out).unwrap_or_default();
    let json = serde_json::from_slice(&bytes).unwrap_or(serde_json::Value::Null);
    (status.status.code().unwrap(), json, bytes)
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let (code, json, first) = run_json(&["dual-check", "--seed", "4"], &out);
    assert_eq!(code, 0);
    assert_eq!(json["passed"], true);
    assert_eq!(json["experiment"], "dual-check");
    assert!(json.get("wall_time_s").is_none());
    let (_, _, second) = run_json(&["dual-check", "--seed", "4", "--jobs", "1"], &out);
    assert_eq!(first, second);
}

#[test]
fn csv_format_lists_checks() {
    let out = tool().args(["maps-verify", "--format", "csv"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("name,value,tolerance,passed"));
    assert!(lines.all(|l| l.ends_with(",true")), "{text}");
}

#[test]
fn failed_checks_and_bad_configs_have_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let wrong = dir.path().join("wrong.json");
    fs::write(
        &wrong,
        r#"{"schema_version": 1, "experiment": "girth", "expected": {"girth": 7.0}}"#,
    )
    .unwrap();
    let (code, json, _) = run_json(&["girth", "--config", wrong.to_str().unwrap()], &dir.path().join("o.json"));
    assert_eq!(code, 1);
    assert_eq!(json["passed"], false);

    let broken = dir.path().join("broken.json");
    fs::write(&broken, r#"{"schema_version": 1, "experiment": "girth", "space": {"dim": 1}}"#).unwrap();
    let out = tool().args(["girth", "--config", broken.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn subcommand_overrides_config_and_plot_tables_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"schema_version": 1, "experiment": "girth", "solver": {"m_pairs": 3}}"#).unwrap();
    let plots = dir.path().join("plots");
    let status = tool()
        .args(["diameter", "--config", cfg.to_str().unwrap(), "--plot-dir", plots.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(status.status.success());
    let json: serde_json::Value = serde_json::from_slice(&status.stdout).unwrap();
    assert_eq!(json["experiment"], "diameter");
    let table = fs::read_to_string(plots.join("diameter_distances.csv")).unwrap();
    assert_eq!(table.lines().count(), 4);
}

#[test]
fn example_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs");
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        finsler_duality::harness::ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}
