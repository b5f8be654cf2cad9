//! End-to-end tests of the `genpf` binary: exit codes, report shape,
//! file outputs and error handling.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn genpf(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_genpf"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawning genpf")
}

fn write(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        !out.stdout.is_empty(),
        "no stdout; stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const SYS_A: &str = r#"{ "n": 2, "m": 4, "gains": [[1, 1, -4, -4], [-1, -1, 1, 1]] }"#;
const SYS_B: &str = r#"{
  "supporter_gains": [["1/2", 0, 0], [0, 4, 4]],
  "repressor_gains": [[0, 2, 1], [1, 0, 0]]
}"#;
const SYS_D: &str = r#"{ "gains": [[1, 1, -1], [-1, 0, 1]] }"#;

#[test]
fn solve_reports_optimum_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let instance = write(dir.path(), "a.json", SYS_A);
    let out = genpf(&["solve", &instance], dir.path());
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert_eq!(doc["command"], "solve");
    let beta = doc["result"]["beta_star"]["decimal"].as_f64().unwrap();
    assert!((beta - 0.5).abs() < 1e-10);
    assert_eq!(doc["result"]["selection"], serde_json::json!([0, 2]));
}

#[test]
fn solve_writes_trace_when_asked() {
    let dir = tempfile::tempdir().unwrap();
    let instance = write(dir.path(), "b.json", SYS_B);
    let trace = dir.path().join("trace.json");
    let out = genpf(
        &["solve", &instance, "--trace", trace.to_str().unwrap()],
        dir.path(),
    );
    assert!(out.status.success());
    let trace: Value = serde_json::from_str(&std::fs::read_to_string(trace).unwrap()).unwrap();
    assert!(trace["bisection"].as_array().unwrap().len() > 10);
    assert!(trace["elimination"].as_array().unwrap().len() == 2);
}

#[test]
fn solve_on_reducible_system_exits_two_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let instance = write(dir.path(), "d.json", SYS_D);
    let out = genpf(&["solve", &instance], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["reducible"], true);
    assert_eq!(doc["result"]["witness"]["kind"], "reducible-selection");
}

#[test]
fn check_irreducible_verdicts_and_dot_export() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", SYS_A);
    let dot = dir.path().join("graph.dot");
    let out = genpf(
        &["check-irreducible", &a, "--dot", dot.to_str().unwrap()],
        dir.path(),
    );
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["irreducible"], true);
    assert_eq!(doc["result"]["rounds"], 1);
    assert!(doc["result"]["witness"].is_null());
    let dot_text = std::fs::read_to_string(dot).unwrap();
    assert!(dot_text.contains("e0 -> e1"));

    let d = write(dir.path(), "d.json", SYS_D);
    let out = genpf(&["check-irreducible", &d], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["irreducible"], false);
    assert_eq!(doc["result"]["witness"]["selection"], serde_json::json!([1, 2]));
}

#[test]
fn oracle_enumerates_and_reports_table() {
    let dir = tempfile::tempdir().unwrap();
    let b = write(dir.path(), "b.json", SYS_B);
    let out = genpf(&["oracle", &b], dir.path());
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["enumerated"], 2);
    let best = doc["result"]["best_beta"]["decimal"].as_f64().unwrap();
    assert!((best - 2.0_f64.sqrt()).abs() < 1e-9);
    assert_eq!(doc["result"]["table"].as_array().unwrap().len(), 2);

    let out = genpf(&["oracle", &b, "--budget", "1"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn feasible_verdicts_follow_beta() {
    let dir = tempfile::tempdir().unwrap();
    let b = write(dir.path(), "b.json", SYS_B);
    let out = genpf(&["feasible", &b, "--beta", "1", "--exact"], dir.path());
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["feasible"], true);
    assert!(doc["result"]["witness"].is_array());

    let out = genpf(&["feasible", &b, "--beta", "3/2"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["feasible"], false);
    assert!(doc["result"]["max_violation"].as_f64().unwrap() > 0.0);
}

#[test]
fn gen_power_control_and_solve() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "miso.json",
        r#"{
            "receivers": [[0.0, 0.0], [10.0, 0.0]],
            "transmitters": [
                {"position": [1.0, 0.0], "receiver": 0},
                {"position": [0.0, 1.0], "receiver": 0},
                {"position": [9.0, 0.0], "receiver": 1}
            ],
            "path_loss_exponent": 2.0
        }"#,
    );
    let instance = dir.path().join("instance.json");
    let out = genpf(
        &[
            "gen",
            "power-control",
            "--spec",
            &spec,
            "-o",
            instance.to_str().unwrap(),
            "--max-denominator",
            "1000000",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let out = genpf(&["solve", instance.to_str().unwrap()], dir.path());
    assert!(out.status.success());
    let doc = stdout_json(&out);
    // The less-interfering transmitter wins receiver 0.
    assert_eq!(doc["result"]["selection"], serde_json::json!([1, 2]));
}

#[test]
fn gen_economy_matches_square_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "econ.json",
        r#"{
            "commodities": 2,
            "industries": [
                {"production_rates": [1, 0], "requirement_rates": [0, 2]},
                {"production_rates": [0, 1], "requirement_rates": [1, 0]}
            ]
        }"#,
    );
    let instance = dir.path().join("instance.json");
    let out = genpf(
        &["gen", "economy", "--spec", &spec, "-o", instance.to_str().unwrap()],
        dir.path(),
    );
    assert!(out.status.success());
    let out = genpf(&["solve", instance.to_str().unwrap()], dir.path());
    let doc = stdout_json(&out);
    let beta = doc["result"]["beta_star"]["decimal"].as_f64().unwrap();
    assert!((beta - 1.0 / 2.0_f64.sqrt()).abs() < 1e-10);
}

#[test]
fn gen_random_is_seed_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("one.json");
    let b = dir.path().join("two.json");
    for path in [&a, &b] {
        let out = genpf(
            &["gen", "random", "--seed", "42", "-o", path.to_str().unwrap()],
            dir.path(),
        );
        assert!(out.status.success());
        let doc = stdout_json(&out);
        assert_eq!(doc["seed"], 42);
    }
    assert_eq!(
        std::fs::read(&a).unwrap(),
        std::fs::read(&b).unwrap(),
        "same seed must generate identical instances"
    );
}

#[test]
fn verify_round_trip_and_tamper_detection() {
    let dir = tempfile::tempdir().unwrap();
    let instance = write(dir.path(), "b.json", SYS_B);
    let out = genpf(&["solve", &instance], dir.path());
    assert!(out.status.success());
    let solution_path = dir.path().join("solution.json");
    std::fs::write(&solution_path, &out.stdout).unwrap();

    let out = genpf(
        &["verify", &instance, solution_path.to_str().unwrap()],
        dir.path(),
    );
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["passed"], true);

    // Tamper with beta and watch verification fail.
    let mut doc: Value = serde_json::from_slice(&std::fs::read(&solution_path).unwrap()).unwrap();
    doc["result"]["beta_star"]["decimal"] = serde_json::json!(1.5);
    std::fs::write(&solution_path, serde_json::to_string(&doc).unwrap()).unwrap();
    let out = genpf(
        &["verify", &instance, solution_path.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn text_format_is_available_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", SYS_A);
    let out = genpf(&["solve", &a, "--format", "text"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("beta* = 0.5"));
}

#[test]
fn malformed_inputs_exit_one_with_distinct_messages() {
    let dir = tempfile::tempdir().unwrap();
    let bad_json = write(dir.path(), "bad.json", "{ not json");
    let out = genpf(&["solve", &bad_json], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid JSON"));

    let ragged = write(dir.path(), "ragged.json", r#"{ "gains": [[1, -1], [1]] }"#);
    let out = genpf(&["solve", &ragged], dir.path());
    assert_eq!(out.status.code(), Some(1));

    let out = genpf(&["solve", "no_such_file.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read"));

    let invalid = write(
        dir.path(),
        "invalid.json",
        r#"{ "supporter_gains": [[1, 1]], "repressor_gains": [[2, 0]] }"#,
    );
    let out = genpf(&["solve", &invalid], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sign conflict"));
}

#[test]
fn solve_strips_redundant_affectors_and_reexpands() {
    let dir = tempfile::tempdir().unwrap();
    // SYS-A plus a dead affector column in the middle.
    let padded = write(
        dir.path(),
        "padded.json",
        r#"{ "gains": [[1, 1, -2, -4, -4], [-1, -1, 0, 1, 1]] }"#,
    );
    let out = genpf(&["solve", &padded], dir.path());
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["removed_affectors"], serde_json::json!([2]));
    let x = doc["result"]["x"].as_array().unwrap();
    assert_eq!(x.len(), 5);
    assert_eq!(x[2], 0.0);
    assert_eq!(doc["result"]["selection"], serde_json::json!([0, 3]));
}
