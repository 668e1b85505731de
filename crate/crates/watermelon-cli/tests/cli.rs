use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_watermelon"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = run(&all);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("watermelon-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn zq_json_matches_box_product() {
    let v = json(&["zq", "2", "2", "1"]);
    assert_eq!(
        v,
        serde_json::json!({"min_degree": 0, "coeffs": ["1", "1", "2", "1", "1"]})
    );
}

#[test]
fn counts_agree_with_brute_force() {
    assert_eq!(json(&["count", "2", "2", "2"])["count"], "20");
    assert_eq!(json(&["count", "2", "2", "1", "--brute"])["count"], "6");
}

#[test]
fn schur_principal_specialization() {
    let v = json(&["schur", "--lambda", "1,1", "--N", "2", "--at", "q_n"]);
    assert_eq!(
        v["value"]["poly"],
        serde_json::json!({"min_degree": 3, "coeffs": ["1"]})
    );
}

#[test]
fn verify_pinned_identity_exact() {
    let out = run(&["verify", "theorem3", "--N", "3", "--L", "2", "--M", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("EXACT-MATCH"));
}

#[test]
fn verify_all_small_passes() {
    let v = json(&["verify", "all", "--small"]);
    assert_ne!(v["status"], "MISMATCH");
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 12);
    assert!(reports.iter().all(|r| r["status"] != "MISMATCH"), "{v}");
}

#[test]
fn numeric_outputs_carry_errors() {
    for args in [
        vec!["amplitude", "--from", "0,1", "--to", "1,2", "--t", "0.5", "--M", "4"],
        vec!["persistence", "--N", "2", "--M", "5", "--n", "1", "--t", "0.5"],
        vec![
            "autocorr", "--N", "2", "--M", "5", "--n", "1", "--m", "1", "--t1", "0.3", "--t2", "0.4",
        ],
    ] {
        let v = json(&args);
        for key in ["params", "value", "abs_err", "wall_time_ms"] {
            assert!(v.get(key).is_some(), "{args:?} lacks {key}");
        }
        assert!(v["abs_err"].as_f64().unwrap() < 1e-9);
    }
}

#[test]
fn amplitude_methods_agree() {
    let base = [
        "amplitude",
        "--from",
        "0,2",
        "--to",
        "1,3",
        "--t",
        "1.0",
        "--M",
        "5",
        "--method",
    ];
    let vals: Vec<f64> = ["det", "spectral", "series"]
        .iter()
        .map(|m| {
            let mut a = base.to_vec();
            a.push(m);
            json(&a)["value"].as_f64().unwrap()
        })
        .collect();
    assert!(
        (vals[0] - vals[1]).abs() < 1e-9 && (vals[0] - vals[2]).abs() < 1e-9,
        "{vals:?}"
    );
}

#[test]
fn validation_and_usage_errors_exit_2() {
    let collide = run(&["amplitude", "--from", "1,1", "--to", "1,2", "--t", "0.5", "--M", "4"]);
    assert_eq!(collide.status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&["zq", "2", "2"]).status.code(), Some(2));
    let budget = run(&[
        "persistence",
        "--N",
        "5",
        "--M",
        "20",
        "--n",
        "0",
        "--t",
        "1",
        "--budget",
        "10",
    ]);
    assert_eq!(budget.status.code(), Some(2));
    assert_eq!(run(&["zq", "1", "1", "1", "--jobs", "0"]).status.code(), Some(2));
}

#[test]
fn walk_counts() {
    assert_eq!(
        json(&["walks", "--from", "2", "--to", "2", "--K", "2", "--M", "3"])["count"],
        "2"
    );
    let v = json(&[
        "walks",
        "--from",
        "2",
        "--to",
        "2",
        "--K",
        "1",
        "--K2",
        "1",
        "--bottleneck",
        "1",
        "--M",
        "3",
    ]);
    assert_eq!(v["count"], "2");
}

#[test]
fn draw_writes_all_watermelons() {
    let dir = scratch("draw");
    let v = json(&[
        "draw",
        "watermelon",
        "--N",
        "2",
        "--Mcal",
        "1",
        "--all",
        "--out",
        dir.to_str().unwrap(),
    ]);
    let files = v["files"].as_array().unwrap();
    assert_eq!(files.len(), 6);
    let docs: Vec<String> = files
        .iter()
        .map(|f| std::fs::read_to_string(f.as_str().unwrap()).unwrap())
        .collect();
    assert!(docs.iter().all(|d| d.starts_with("<?xml") && d.contains("<polyline")));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn asymptotics_reports_exponents() {
    let v = json(&[
        "asymptotics",
        "--kind",
        "amplitude",
        "--N",
        "1",
        "--M",
        "60",
        "--tmin",
        "20",
        "--tmax",
        "60",
    ]);
    assert_eq!(v["status"], "ok");
    let fit = v["report"]["fitted_exponent"].as_f64().unwrap();
    assert!((fit - 0.5).abs() < 0.075, "{fit}");
    let small = json(&["asymptotics", "--kind", "amplitude", "--N", "1", "--M", "8"]);
    assert_eq!(small["status"], "regime-too-small");
}
