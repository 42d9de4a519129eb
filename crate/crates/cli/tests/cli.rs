//! End-to-end tests of the binary: exit codes, JSON schemas, and
//! byte-level determinism of outputs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rholatin"))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn corner_instance() -> &'static str {
    r#"{"n":3,"k":4,"rho":[3,2,2,2],"r":2,"s":2,"grid":[[1,2],[2,1]]}"#
}

fn blocked_instance() -> &'static str {
    r#"{"n":3,"k":3,"rho":[3,3,3],"r":2,"s":2,"grid":[[1,2],[2,1]]}"#
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process exited")
}

#[test]
fn validate_reports_statistics() {
    let dir = TempDir::new().unwrap();
    let path = write_file(dir.path(), "inst.json", corner_instance());
    let out = bin().arg("validate").arg(&path).output().unwrap();
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    assert_eq!(report["valid"], true);
    assert_eq!(report["e"], serde_json::json!([2, 2, 0, 0]));
    assert_eq!(report["p_r"], serde_json::json!([3, 4]));
    assert_eq!(report["necessary_bound"]["holds"], true);
}

#[test]
fn validate_rejects_sum_mismatch() {
    let dir = TempDir::new().unwrap();
    let path = write_file(
        dir.path(),
        "bad.json",
        r#"{"n":2,"k":2,"rho":[2,1],"r":1,"s":1,"grid":[[1]]}"#,
    );
    let out = bin().arg("validate").arg(&path).output().unwrap();
    assert_eq!(code(&out), 2);
    let report = stdout_json(&out);
    assert!(report["error"].as_str().unwrap().contains("SumMismatch"));
}

#[test]
fn validate_rejects_row_repeat_with_cell() {
    let dir = TempDir::new().unwrap();
    let path = write_file(
        dir.path(),
        "bad.json",
        r#"{"n":3,"k":3,"rho":[3,3,3],"r":1,"s":2,"grid":[[1,1]]}"#,
    );
    let out = bin().arg("validate").arg(&path).output().unwrap();
    assert_eq!(code(&out), 2);
    let text = stdout_json(&out)["error"].as_str().unwrap().to_string();
    assert!(text.contains("RowRepeat"), "{text}");
    assert!(text.contains("(0,1)"), "{text}");
}

#[test]
fn complete_emits_square_that_revalidates() {
    let dir = TempDir::new().unwrap();
    let path = write_file(dir.path(), "inst.json", corner_instance());
    let emitted = dir.path().join("square.json");
    let out = bin()
        .arg("complete")
        .arg(&path)
        .arg("--emit")
        .arg(&emitted)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let square = stdout_json(&out);
    assert_eq!(square["r"], 3);
    assert_eq!(square["s"], 3);
    // Round trip: the emitted square validates as an instance.
    let check = bin().arg("validate").arg(&emitted).output().unwrap();
    assert_eq!(code(&check), 0);
}

#[test]
fn complete_reports_certificates() {
    let dir = TempDir::new().unwrap();
    let path = write_file(dir.path(), "inst.json", blocked_instance());
    let out = bin().arg("complete").arg(&path).output().unwrap();
    assert_eq!(code(&out), 1);
    let report = stdout_json(&out);
    assert_eq!(report["infeasible"], true);
    assert_eq!(report["reverified"], true);
    assert_eq!(report["certificate"]["family"], "necessary-bound");
}

#[test]
fn complete_full_instance_echoes_input() {
    let dir = TempDir::new().unwrap();
    let path = write_file(
        dir.path(),
        "full.json",
        r#"{"n":2,"k":2,"rho":[2,2],"r":2,"s":2,"grid":[[1,2],[2,1]]}"#,
    );
    let out = bin().arg("complete").arg(&path).output().unwrap();
    assert_eq!(code(&out), 0);
    let square = stdout_json(&out);
    assert_eq!(square["grid"], serde_json::json!([[1, 2], [2, 1]]));
}

#[test]
fn complete_output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let path = write_file(dir.path(), "inst.json", corner_instance());
    let first = bin().arg("complete").arg(&path).output().unwrap();
    let second = bin().arg("complete").arg(&path).output().unwrap();
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn check_necessary_and_flow() {
    let dir = TempDir::new().unwrap();
    let blocked = write_file(dir.path(), "blocked.json", blocked_instance());
    let out = bin()
        .args(["check", "--theorem", "necessary"])
        .arg(&blocked)
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
    let report = stdout_json(&out);
    assert_eq!(report["violators"][0]["symbol"], 3);

    let ok = write_file(dir.path(), "ok.json", corner_instance());
    let out = bin()
        .args(["check", "--theorem", "flow"])
        .arg(&ok)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["holds"], true);
}

#[test]
fn check_hall_requires_full_width() {
    let dir = TempDir::new().unwrap();
    let path = write_file(dir.path(), "inst.json", corner_instance());
    let out = bin()
        .args(["check", "--theorem", "hall"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);

    let hall = write_file(
        dir.path(),
        "hall.json",
        r#"{"n":3,"k":3,"rho":[3,3,3],"r":1,"s":3,"grid":[[1,2,3]]}"#,
    );
    let out = bin()
        .args(["check", "--theorem", "hall"])
        .arg(&hall)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    assert_eq!(report["conditions_agree"], true);
    assert_eq!(report["holds"], true);
}

#[test]
fn check_ryser_reports_audit_fields() {
    let dir = TempDir::new().unwrap();
    let path = write_file(dir.path(), "inst.json", corner_instance());
    let out = bin()
        .args(["check", "--theorem", "ryser"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    assert_eq!(report["holds"], true);
    assert_eq!(report["row_groups_agree"], true);
    assert!(report["witness"].is_object());
}

#[test]
fn check_guard_exceeded() {
    let dir = TempDir::new().unwrap();
    // Order 6 full-width instance: above the pairwise enumeration guard.
    let path = write_file(
        dir.path(),
        "big.json",
        r#"{"n":6,"k":6,"rho":[6,6,6,6,6,6],"r":1,"s":6,"grid":[[1,2,3,4,5,6]]}"#,
    );
    let out = bin()
        .args(["check", "--theorem", "hall"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);
}

#[test]
fn generate_is_deterministic_per_seed() {
    let run = || {
        bin()
            .args(["generate", "--n", "3", "--k", "4", "--rho", "3,2,2,2", "--seed", "7"])
            .output()
            .unwrap()
    };
    let first = run();
    let second = run();
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
    let square = stdout_json(&first);
    assert_eq!(square["n"], 3);
    // The generated square validates.
    let dir = TempDir::new().unwrap();
    let path = write_file(
        dir.path(),
        "square.json",
        std::str::from_utf8(&first.stdout).unwrap(),
    );
    let check = bin().arg("validate").arg(&path).output().unwrap();
    assert_eq!(code(&check), 0);
}

#[test]
fn generate_rejects_bad_budgets() {
    let out = bin()
        .args(["generate", "--n", "2", "--k", "2", "--rho", "2,1"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn audit_small_sweep_agrees_and_logs_deterministically() {
    let dir = TempDir::new().unwrap();
    let log_a = dir.path().join("a.log");
    let log_b = dir.path().join("b.log");
    let run = |log: &Path, extra: &[&str]| {
        let mut cmd = bin();
        cmd.args(["audit", "--seeds", "0..40", "--max-n", "3", "--log-file"])
            .arg(log)
            .args(extra);
        cmd.output().unwrap()
    };
    let first = run(&log_a, &[]);
    assert_eq!(code(&first), 0);
    let report = stdout_json(&first);
    assert_eq!(report["instances"], 40);
    assert_eq!(report["all_agree"], true);
    let second = run(&log_b, &["--sequential"]);
    assert_eq!(code(&second), 0);
    // Parallel and sequential sweeps write identical logs.
    assert_eq!(
        std::fs::read_to_string(&log_a).unwrap(),
        std::fs::read_to_string(&log_b).unwrap()
    );
}

#[test]
fn audit_guard_exceeded() {
    let out = bin()
        .args(["audit", "--seeds", "0..5", "--max-n", "9"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);
}
