use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn airy_edge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_airy-edge")).args(args).env_remove("AIRY_EDGE_THREADS").output().unwrap()
}

fn json_out(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn gap_is_stable_in_the_order() {
    let a = json_out(&airy_edge(&["gap", "--s", "-2", "--order", "40"]));
    let b = json_out(&airy_edge(&["gap", "--s", "-2", "--order", "80"]));
    assert_eq!(a["s"], -2.0);
    assert_eq!(a["order"], 40);
    let (va, vb) = (a["value"].as_f64().unwrap(), b["value"].as_f64().unwrap());
    assert!((va - vb).abs() < 1e-6, "{va} vs {vb}");
    assert!(va > 0.0 && va < 1.0);
}

#[test]
fn usage_and_numeric_errors_have_distinct_codes() {
    assert_eq!(airy_edge(&["gap", "--s", "0", "--bogus"]).status.code(), Some(2));
    assert_eq!(airy_edge(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(airy_edge(&["kernel", "--beta", "3"]).status.code(), Some(2));
    assert_eq!(airy_edge(&["drift", "--quantity", "finite"]).status.code(), Some(2));
    let out = airy_edge(&["gap", "--s", "0", "--order", "5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("quad_order"));
}

#[test]
fn sample_is_deterministic_with_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let path = dir.path().join(name);
        let p = path.to_str().unwrap();
        let args = ["sample", "--beta", "2", "--n", "200", "--count", "10000", "--seed", "7", "--soft-edge", "--threads", threads, "--out", p];
        assert!(airy_edge(&args).status.success());
        path
    };
    let a = run("a.csv", "1");
    let b = run("b.csv", "1");
    let c = run("c.csv", "4");
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    assert_eq!(bytes, std::fs::read(&c).unwrap());
    let text = String::from_utf8(bytes).unwrap();
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 10_000 * 200);
    assert_eq!(rows[0].split(',').count(), 3);

    let m = read_json(&dir.path().join("a.csv.manifest.json"));
    assert_eq!(m["command"], "sample");
    assert_eq!(m["seed"], 7);
    assert_eq!(m["threads"], 1);
    assert_eq!(m["params"]["n"], 200);
    assert!(m["params"]["soft_edge"].as_bool().unwrap());
    let digest = m["outputs"][0]["sha256"].as_str().unwrap();
    assert_eq!(digest.len(), 64);
    assert_eq!(digest, read_json(&dir.path().join("b.csv.manifest.json"))["outputs"][0]["sha256"]);
    // Only the artifacts and manifests remain: no temporary files.
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 6);
}

#[test]
fn config_file_supplies_flags_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("gap.json");
    std::fs::write(&cfg, r#"{"s": -1.5, "order": 30}"#).unwrap();
    let c = cfg.to_str().unwrap();
    let a = json_out(&airy_edge(&["gap", "--config", c]));
    assert_eq!((a["s"].as_f64(), a["order"].as_u64()), (Some(-1.5), Some(30)));
    let b = json_out(&airy_edge(&["--config", c, "gap", "--order", "50"]));
    assert_eq!((b["s"].as_f64(), b["order"].as_u64()), (Some(-1.5), Some(50)));

    let out = dir.path().join("g.json");
    let o = out.to_str().unwrap();
    assert!(airy_edge(&["gap", "--config", c, "--out", o]).status.success());
    let m = read_json(&dir.path().join("g.json.manifest.json"));
    assert_eq!(m["inputs"][0]["path"], c);
    assert_eq!(m["inputs"][0]["sha256"].as_str().unwrap().len(), 64);

    std::fs::write(&cfg, "not json").unwrap();
    assert_eq!(airy_edge(&["gap", "--config", c]).status.code(), Some(2));
}

#[test]
fn thread_cap_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.json");
    let status = Command::new(env!("CARGO_BIN_EXE_airy-edge"))
        .args(["gap", "--s", "0", "--threads", "8", "--out", out.to_str().unwrap()])
        .env("AIRY_EDGE_THREADS", "2")
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(read_json(&dir.path().join("g.json.manifest.json"))["threads"], 2);
}

#[test]
fn kernel_csv_layout_and_round_trip() {
    let out = airy_edge(&["kernel", "--beta", "2", "--x", "-1,0", "--y", "0.5"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# beta=2 n=limit"));
    assert_eq!(lines[1], "x,y,value");
    assert_eq!(lines.len(), 4);
    let v: f64 = lines[2].split(',').nth(2).unwrap().parse().unwrap();
    let want = airy_edge::kernels::k_airy2(-1.0, 0.5);
    assert_eq!(v.to_bits(), want.to_bits());

    let out = airy_edge(&["kernel", "--beta", "4", "--n", "5", "--lo", "-2", "--hi", "0", "--step", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[1], "x,y,k11,k12,k21,k22");
    assert_eq!(lines.len(), 2 + 9);
}

#[test]
fn failed_verdicts_exit_with_one() {
    // The golden G-decay ceiling refers to s = 64; at s = 16 the value is still above it.
    let out = airy_edge(&["verify", "--suite", "G-decay", "--s", "4,16"]);
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["verdict"]["status"], "fail");
    let out = airy_edge(&["verify", "--suite", "G-decay", "--s", "4,16", "--no-ceilings"]);
    assert_eq!(json_out(&out)["verdict"]["status"], "pass");
}

#[test]
fn i_integral_suite_passes_under_default_ceilings() {
    let r = json_out(&airy_edge(&["verify", "--suite", "I-integrals", "--beta", "2", "--n", "50"]));
    assert_eq!(r["suite"], "I-integrals");
    assert_eq!(r["verdict"]["status"], "pass", "{:#}", r["verdict"]);
    assert_eq!(r["verdict"]["checks"].as_array().unwrap().len(), 12);
    for key in ["params", "grid", "values"] {
        assert!(r.get(key).is_some());
    }
}

#[test]
fn simulate_and_girsanov_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.csv");
    let o = out.to_str().unwrap();
    let args = ["simulate", "--n", "4", "--paths", "3", "--dt", "1e-3", "--t-final", "0.01", "--seed", "2", "--out", o];
    assert!(airy_edge(&args).status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().nth(1), Some("path,time,rank,position"));
    assert_eq!(text.lines().count(), 2 + 3 * 11 * 4);
    let m = read_json(&dir.path().join("p.csv.manifest.json"));
    assert_eq!(m["summary"]["paths"], 3);
    assert_eq!(m["summary"]["order_violations"], 0);

    let g = json_out(&airy_edge(&["girsanov", "--n", "20", "--paths", "40", "--t-final", "0.02", "--h", "0.001,100"]));
    let t = g["thresholds"].as_array().unwrap();
    assert_eq!(t.len(), 2);
    assert!(t[0]["mean_stopping_time"].as_f64().unwrap() <= t[1]["mean_stopping_time"].as_f64().unwrap());
    assert!((t[1]["mean_stopping_time"].as_f64().unwrap() - 0.02).abs() < 1e-12);
    assert_eq!(t[1]["stopped_fraction"], 0.0);
}
