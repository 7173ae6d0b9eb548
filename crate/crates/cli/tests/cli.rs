use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_holodiv"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn report(out: &std::path::Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap()
}

#[test]
fn divide_writes_report_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let status = bin()
        .args(["divide", fixture("model_pair.json").to_str().unwrap(), "--at", "0.1,0,0,0", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["version"], "1");
    assert_eq!(r["passed"], true);
    let ball = &r["results"][0]["payload"]["balls"][0];
    assert!(ball["max_residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn unit_numerator_near_common_zero_fails() {
    let status = bin()
        .args(["divide", fixture("unit_numerator.json").to_str().unwrap(), "--at", "0.01,0,0,0"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
    let r: serde_json::Value = serde_json::from_slice(&status.stdout).unwrap();
    assert_eq!(r["results"][0]["payload"]["balls"][0]["incomplete_ideal"], true);
}

#[test]
fn bad_inputs_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"domain": {"type": "ball", "center": [[1,0],[0,0]], "radius": 1}}"#).unwrap();
    let out = bin().args(["glue", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("f1"));

    assert_eq!(bin().arg("nonsense").status().unwrap().code(), Some(3));
    assert_eq!(bin().args(["divide", "x.json", "--at", "1,2"]).status().unwrap().code(), Some(3));
    let missing = dir.path().join("missing.json");
    assert_eq!(bin().args(["certify", missing.to_str().unwrap()]).status().unwrap().code(), Some(3));
}

#[test]
fn kernel_check_is_deterministic_under_seed_and_threads() {
    let run = |threads: &str| {
        bin()
            .args(["kernel-check", "--seed", "11", "--samples", "20000", "--g", "z1*z2", "--threads", threads])
            .output()
            .unwrap()
    };
    let a = run("1");
    let b = run("4");
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn kernel_check_without_seed_is_an_input_error() {
    let out = bin().args(["kernel-check", "--samples", "1000"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn counterexample_reports_divergence_rate() {
    let out = bin().args(["counterexample", "--q", "5", "--seed", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let p = &r["results"][0]["payload"];
    assert_eq!(p["expected_slope"], -2.0);
    assert!((p["slope"].as_f64().unwrap() + 2.0).abs() < 0.2);
}
