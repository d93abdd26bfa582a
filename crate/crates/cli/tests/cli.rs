use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_northcott-lab")).args(args).output().expect("binary runs")
}

fn lab_env(args: &[&str], key: &str, val: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_northcott-lab")).args(args).env(key, val).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("northcott-lab-tests-{}", std::process::id())).join(name);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout_json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn error_json(o: &Output) -> Value {
    let line = String::from_utf8_lossy(&o.stderr);
    serde_json::from_str(line.trim()).expect("stderr is a JSON error")
}

fn build_w1(dir: &Path, levels: &str) -> PathBuf {
    let out = dir.join("spec.json");
    let o = lab(&[
        "tower", "build", "--c", "log(2)", "--n", "1", "--weight", "const:1", "--levels", levels, "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn tower_build_and_verify() {
    let dir = scratch("tower");
    let spec = build_w1(&dir, "3");
    let v: Value = serde_json::from_str(&fs::read_to_string(&spec).unwrap()).unwrap();
    let ds: Vec<u64> = v["levels"].as_array().unwrap().iter().map(|l| l["d"].as_u64().unwrap()).collect();
    assert_eq!(ds, [2, 5, 7]);
    let ps: Vec<u64> = v["levels"].as_array().unwrap().iter().map(|l| l["p"].as_u64().unwrap()).collect();
    assert_eq!(ps, [5, 37, 131]);

    let r = stdout_json(&lab(&["tower", "verify", spec.to_str().unwrap()]));
    assert_eq!(r["all_ok"], Value::Bool(true));
}

#[test]
fn tampered_spec_fails_verification() {
    let dir = scratch("tamper");
    let spec = build_w1(&dir, "2");
    let text = fs::read_to_string(&spec).unwrap().replacen("\"q\": 7", "\"q\": 11", 1);
    fs::write(&spec, text).unwrap();
    let o = lab(&["tower", "verify", spec.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(error_json(&o)["error"]["kind"], "CheckFailed");
}

#[test]
fn outputs_are_reproducible() {
    let a = scratch("repro-a");
    let b = scratch("repro-b");
    let digest = |dir: &Path| -> Value {
        build_w1(dir, "4");
        let m: Value =
            serde_json::from_str(&fs::read_to_string(dir.join("spec.json.manifest.json")).unwrap()).unwrap();
        m["outputs"][0]["sha256"].clone()
    };
    let (da, db) = (digest(&a), digest(&b));
    assert!(da.is_string());
    assert_eq!(da, db);
}

#[test]
fn census_single_d() {
    let v = stdout_json(&lab(&["group", "census", "--d", "5"]));
    let counts = &v[0]["counts_by_order"];
    assert_eq!(counts["5"], 1);
    assert_eq!(counts["4"], 5);
    assert_eq!(v[0]["all_claims_hold"], true);
}

#[test]
fn census_range_skips_composites() {
    let v = stdout_json(&lab(&["group", "census", "--d", "3..11"]));
    let ds: Vec<u64> = v.as_array().unwrap().iter().map(|c| c["d"].as_u64().unwrap()).collect();
    assert_eq!(ds, [3, 5, 7, 11]);
    let o = lab(&["group", "census", "--d", "9"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(error_json(&o)["error"]["kind"], "UnsupportedD");
}

#[test]
fn height_eval_line() {
    let o = lab(&["height", "eval", "--radical", "5/7^1/2", "--weight", "gamma:0"]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "log(7)/2 ≈ 0.9730");
    let v = stdout_json(&lab(&["height", "eval", "--radical", "2^(1/3)", "--weight", "gamma:1", "--json"]));
    assert_eq!(v["degree"], "3");
    assert_eq!(v["weighted_height"]["terms"][0][1], "1/1");
}

#[test]
fn bracket_csv() {
    let dir = scratch("bracket");
    let spec = build_w1(&dir, "3");
    let csv = dir.join("table.csv");
    let o = lab(&["northcott", "bracket", spec.to_str().unwrap(), "--levels", "3", "--out", csv.to_str().unwrap()]);
    assert!(o.status.success());
    let text = fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].starts_with("i,d,p,q,lower,upper"));
    assert!(rows[1].starts_with("1,2,5,7,\"log(2)/2\",\"log(7)/2\",0.34657359028,0.972955074528"));
}

#[test]
fn enumerate_rationals() {
    let v = stdout_json(&lab(&["northcott", "enumerate", "--deg", "1", "--bound", "0.6931481805599453"]));
    assert_eq!(v["count"], 7);
}

#[test]
fn weight_from_family_file() {
    let dir = scratch("family");
    let samples = dir.join("samples.json");
    fs::write(
        &samples,
        r#"[{"degree": 2, "height": "log(2)/2"}, {"degree": 3, "height": "log(2)/3"}, {"degree": 5, "height": "log(2)/5"}]"#,
    )
    .unwrap();
    let v = stdout_json(&lab(&[
        "northcott", "weight-from-family", "--samples", samples.to_str().unwrap(), "--case", "nor-zero",
    ]));
    assert_eq!(v["verified"], true);
    let o = lab(&["northcott", "weight-from-family", "--samples", samples.to_str().unwrap(), "--case", "nor-infinite"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn matrix_commands() {
    let dir = scratch("matrix");
    let rot = dir.join("rot.json");
    fs::write(&rot, r#"{"shape": "rational", "rows": [["1", "1"], ["-1", "1"]]}"#).unwrap();
    let v = stdout_json(&lab(&["matrix", "spectral", "--file", rot.to_str().unwrap()]));
    assert_eq!(v["spectral_height"]["terms"], serde_json::json!([]));
    assert_eq!(v["spectral_height"]["approx"].as_f64(), Some(0.0));
    assert!(!String::from_utf8_lossy(&lab(&["matrix", "spectral", "--file", rot.to_str().unwrap()]).stdout).contains("-0"));

    let blk = dir.join("block.json");
    fs::write(&blk, r#"{"shape": "block", "n": 3, "alpha": {"zeta": [1, 0], "scalar": "1/1", "factors": [[5, 7, "1/2"]]}}"#)
        .unwrap();
    let v = stdout_json(&lab(&["matrix", "spectral", "--file", blk.to_str().unwrap(), "--weight", "const:1"]));
    assert_eq!(v["spectral_height"]["terms"], serde_json::json!([[7, "1/4"]]));

    let spec = build_w1(&dir, "4");
    for cmd in ["opnorth-check", "prop-spectral-check"] {
        let v = stdout_json(&lab(&["matrix", cmd, spec.to_str().unwrap(), "--n", "3", "--levels", "4"]));
        assert_eq!(v["all_ok"], true, "{cmd}");
        assert_eq!(v["levels"].as_array().unwrap().len(), 4);
    }
}

#[test]
fn error_classes() {
    let o = lab(&["tower", "build", "--c", "log(2)", "--weight", "gamma:3/2", "--levels", "2"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(error_json(&o)["error"]["kind"], "WeightIneligible");

    let o = lab(&["tower", "build", "--c", "log(2", "--weight", "const:1", "--levels", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["error"]["class"], "usage");

    let o = lab(&["northcott", "enumerate", "--deg", "5", "--bound", "0.1"]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(error_json(&o)["error"]["kind"], "BudgetExceeded");

    let o = lab(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));

    let o = lab_env(&["group", "census", "--d", "3"], "NORTHCOTT_LAB_THREADS", "zero");
    assert_eq!(o.status.code(), Some(2));
    let o = lab_env(&["group", "census", "--d", "3"], "NORTHCOTT_LAB_THREADS", "1");
    assert!(o.status.success());
}

#[test]
fn selftest_single_criterion() {
    let v = stdout_json(&lab(&["selftest", "--criterion", "6"]));
    assert_eq!(v["passed"], true);
    assert_eq!(v["criteria"].as_array().unwrap().len(), 1);
    let o = lab(&["selftest", "--criterion", "12"]);
    assert_eq!(o.status.code(), Some(2));
}
