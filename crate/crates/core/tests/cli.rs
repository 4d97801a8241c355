use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rado-walk")).args(args).env_remove("RADO_WALK_OUT").output().expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let out = run(args);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}: {}", String::from_utf8_lossy(&out.stderr)));
    (v, out.status.code().expect("exit code"))
}

#[test]
fn kernel_row_exact_at_root() {
    let (v, code) = json(&["kernel-row", "--model", "binary", "--x", "0", "--cap", "16", "--exact"]);
    assert_eq!(code, 0);
    assert_eq!(v["entries"][0]["j"], 1);
    assert_eq!(v["entries"][0]["value"], "3/4");
    assert_eq!(v["sums_to_one"], true);
}

#[test]
fn counterexample_n4() {
    let (v, code) = json(&["counterexample", "--n", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["iota"], "1/4");
    let upper: rado_walk::numerics::ExactRational = v["tree_max_upper"].as_str().unwrap().parse().unwrap();
    assert!(upper <= rado_walk::numerics::ExactRational::ratio(1, 16));
}

#[test]
fn logstar_of_65536() {
    let (v, code) = json(&["logstar", "--x", "65536", "--base", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["value"], 4);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(64));
    assert_eq!(run(&["logstar", "--x", "2", "--bogus"]).status.code(), Some(64));
    // random models need an explicit seed
    assert_eq!(run(&["event-b", "--model", "random"]).status.code(), Some(64));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn verdict_exit_codes() {
    let (v, code) = json(&["event-b", "--model", "random", "--p", "0.5", "--seed", "3", "--n-max", "64"]);
    assert_eq!(code, if v["holds"] == true { 0 } else { 1 });
    let (_, code) = json(&["reversibility", "--cap", "16"]);
    assert_eq!(code, 0);
    // the literal root-child sandwich breaks on this tree
    let dir = std::env::temp_dir().join("rado-walk-cli-tree.json");
    std::fs::write(&dir, r#"{"parent":[null,0,1,1],"mu":[0,1e-3,1e3,1e-3],"nu":[0,1,1e-3,1e3]}"#).unwrap();
    let (v, code) = json(&["hardy-sandwich", "--tree", "file", "--file", dir.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(v["pass_all_tops"], true);
}

#[test]
fn undetermined_exit_code() {
    // a tiny step budget leaves the crossing unresolved
    let (v, code) = json(&["mix-time", "--x0", "16", "--max-steps", "2"]);
    assert_eq!(v["status"], "undetermined");
    assert_eq!(code, 2);
}

#[test]
fn curves_and_sweeps_are_csv() {
    let out = run(&["tv-curve", "--x0", "4", "--steps", "10", "--cap", "256"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "step,tv_lo,tv_hi,escaped");
    assert_eq!(lines.len(), 12);
    let out = run(&["gap-bounds", "--from", "0.1", "--to", "0.9", "--points", "5"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("delta,cheeger,hardy,hardy_chained,series,walk_factor\n"));
    assert_eq!(text.lines().count(), 6);
    let (v, _) = json(&["gap-bounds", "--delta", "0.5"]);
    assert_eq!(v["cheeger"], 0.125);
}

#[test]
fn output_is_deterministic_and_manifested() {
    let args = ["prob-b", "--samples", "500"];
    let a = run(&args).stdout;
    let b = run(&args).stdout;
    assert_eq!(a, b);
    let dir = std::env::temp_dir().join(format!("rado-walk-cli-{}", std::process::id()));
    let status = Command::new(env!("CARGO_BIN_EXE_rado-walk")).args(args).env("RADO_WALK_OUT", &dir).output().unwrap().status;
    assert!(status.success());
    let written = std::fs::read(dir.join("prob-b.json")).unwrap();
    assert_eq!(written, a);
    let manifest: Value = serde_json::from_slice(&std::fs::read(dir.join("prob-b.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "prob-b");
    assert_eq!(manifest["caps"]["samples"], 500);
    assert_eq!(manifest["outputs"][0]["sha256"], rado_walk::report::sha256_hex(&a));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn exact_weights_serialize_as_fractions() {
    let (v, _) = json(&["evolve", "--x0", "0", "--steps", "1", "--cap", "8", "--exact", "--delta", "1/3"]);
    // the root's neighbors are the odd vertices: K(0, 1) = d / (d / (1 - d^2)) = 8/9
    assert_eq!(v["masses"]["1"], "8/9");
}

#[test]
fn verify_all_single_criterion() {
    let out = run(&["verify-all", "--only", "7", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v[0]["status"], "pass");
    let out = run(&["verify-all", "--only", "3"]);
    assert_eq!(out.status.code(), Some(1));
}
