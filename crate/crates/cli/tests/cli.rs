use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use torlib::liberation::FreenessCertificate;
use torlib::AffineZpAction;

fn sample(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../samples").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torlib"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_on(cmd: &str, file: &str, extra: &[&str]) -> Output {
    let path = sample(file);
    let mut args = vec![cmd, path.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_of(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json report")
}

#[test]
fn exit_codes() {
    assert_eq!(run_on("liberate", "shear.json", &[]).status.code(), Some(0));
    assert_eq!(run_on("liberate", "hyperbolic.json", &[]).status.code(), Some(3));
    assert_eq!(run_on("liberate", "commutator.json", &[]).status.code(), Some(3));
    assert_eq!(run_on("liberate", "undecided.json", &[]).status.code(), Some(4));
    assert_eq!(run_on("minimal", "shear.json", &[]).status.code(), Some(2));
}

#[test]
fn malformed_input_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    for (name, body) in [
        ("broken.json", "{"),
        ("noversion.json", r#"{"action":{"p":1,"q":1,"generators":[[[1]]]}}"#),
        (
            "singular.json",
            r#"{"version":1,"action":{"p":1,"q":2,"generators":[[[2,0],[0,1]]]}}"#,
        ),
    ] {
        let path = dir.path().join(name);
        std::fs::write(&path, body).unwrap();
        let out = run(&["analyze", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{name}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "), "{name}");
    }
    assert_eq!(run(&["analyze", "/nonexistent/file.json"]).status.code(), Some(2));
}

#[test]
fn analyze_reports_fix_rank() {
    let text = stdout(&run_on("analyze", "shear.json", &[]));
    assert!(text.contains("fix_rank: 1"), "{text}");
    assert!(text.contains("summary: fix rank 1"), "{text}");
    let text = stdout(&run_on("analyze", "hyperbolic.json", &[]));
    assert!(text.contains("summary: fix trivial"), "{text}");

    let report = json_of(&run_on("analyze", "rotation.json", &["--output", "json"]));
    assert_eq!(report["version"], 1);
    assert_eq!(report["kind"], "affine");
    assert_eq!(report["free_on_box"]["free"], true);
}

#[test]
fn minimal_classifies_flags() {
    let out = run_on("minimal", "flag_not_minimal.json", &[]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("label: LiberableNotMinimal"));
    let report = json_of(&run_on("minimal", "flag_minimal.json", &["--output", "json"]));
    assert_eq!(report["label"], "MinimalLiberable");
    assert_eq!(report["case"], "III");

    let report = json_of(&run_on("minimal", "rotation.json", &["--output", "json"]));
    assert_eq!(report["irrational"], false);
    assert_eq!(report["gamma_zero"]["basis"], serde_json::json!([[1, 0]]));
}

#[test]
fn obstruct_outcomes() {
    let out = run_on("obstruct", "shear_pair.json", &[]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("obstruction: none"));
    let out = run_on("obstruct", "commutator.json", &["--output", "json"]);
    assert_eq!(out.status.code(), Some(3));
    let report = json_of(&out);
    assert_eq!(report["confirmed"], true);
    assert_eq!(report["obstruction"]["ell0"], serde_json::json!([1, 0, 0]));
}

#[test]
fn simulate_csv_and_exact() {
    let out = run_on("simulate", "shear.json", &["--iters", "3", "--x0", "0.5,0.25"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "j,x1,x2\n0,0.5,0.25\n1,0.5,0.75\n2,0.5,0.25\n");

    let missing = run_on("simulate", "rotation.json", &[]);
    assert_eq!(missing.status.code(), Some(2));

    let report = json_of(&run_on(
        "simulate",
        "rotation.json",
        &["--exact", "--assign", "xi1=1/5", "--output", "json"],
    ));
    assert_eq!(report["translation"], serde_json::json!(["1/3", "1/5"]));
    assert_eq!(report["fixed_point"], Value::Null);
}

#[test]
fn seeded_runs_are_deterministic() {
    let args = ["--seed", "11", "--iters", "20"];
    let a = stdout(&run_on("simulate", "rotation.json", &args));
    let b = stdout(&run_on("simulate", "rotation.json", &args));
    assert_eq!(a, b);
    let c = stdout(&run_on("simulate", "rotation.json", &["--seed", "12", "--iters", "20"]));
    assert_ne!(a, c);
    assert_eq!(
        stdout(&run_on("liberate", "shear_pair.json", &["--output", "json"])),
        stdout(&run_on("liberate", "shear_pair.json", &["--output", "json"]))
    );
}

#[test]
fn liberated_output_reloads() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("free.json");
    let out = run_on("liberate", "shear_pair.json", &["-o", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());

    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(report["status"], "liberated");
    let action: AffineZpAction = serde_json::from_value(report["action"].clone()).unwrap();
    let cert: FreenessCertificate = serde_json::from_value(report["certificate"].clone()).unwrap();
    cert.check(&action, 4).unwrap();
    assert!(action.free_box_check(4).is_none());

    let again = run(&["analyze", out_path.to_str().unwrap(), "--output", "json"]);
    assert_eq!(again.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&again.stdout).unwrap();
    assert_eq!(report["kind"], "affine");
    assert_eq!(report["free_on_box"]["free"], true);
}
