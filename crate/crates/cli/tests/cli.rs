use std::fs;

use assert_cmd::Command;
use predicates::prelude::*;
use serde_json::Value;

fn statpoints() -> Command {
    Command::cargo_bin("statpoints").unwrap()
}

fn find_json(args: &[&str]) -> Value {
    let out = statpoints().arg("find").args(args).output().unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn sample_writes_grid_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f2.csv");
    statpoints()
        .args(["sample", "--fn", "f2", "--nx", "120", "--ny", "120", "-o"])
        .arg(&path)
        .assert()
        .success();
    let text = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 121);
    assert!(lines[0].starts_with("120,120,0.033613"));
    assert!(lines[0].ends_with(",-2.0,-2.0"));
}

#[test]
fn minimal_grid() {
    statpoints()
        .args(["sample", "--fn", "f11", "--nx", "4", "--ny", "4"])
        .assert()
        .success()
        .stdout(predicate::str::starts_with("4,4,"));
}

#[test]
fn unknown_function_exits_2_naming_ids() {
    statpoints()
        .args(["sample", "--fn", "bogus"])
        .assert()
        .code(2)
        .stderr(predicate::str::contains("f1, f2, f11, f12, f13, f14"));
}

#[test]
fn undersized_grid_exits_2() {
    statpoints()
        .args(["sample", "--fn", "f2", "--nx", "3"])
        .assert()
        .code(2);
}

#[test]
fn bad_csv_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    fs::write(&path, "4,4,1.0,1.0,0.0,0.0\n1,2,3\n").unwrap();
    statpoints()
        .args(["find", "--in"])
        .arg(&path)
        .assert()
        .code(2)
        .stderr(predicate::str::contains("line 2"));
}

#[test]
fn singular_matrix_exits_3() {
    // a tiny shape parameter makes every kernel entry equal to one
    statpoints()
        .args([
            "find", "--fn", "f2", "--nx", "20", "--ny", "20", "--alpha", "1e-12",
        ])
        .assert()
        .code(3)
        .stderr(predicate::str::contains("singular"));
}

#[test]
fn find_f2_reports_24_isolated() {
    let v = find_json(&["--fn", "f2", "--kernel", "gaussian"]);
    assert_eq!(v["counts"]["isolated"], 24);
    assert_eq!(v["counts"]["curves"], 0);
    assert_eq!(v["bindings"].as_array().unwrap().len(), 24);
    assert_eq!(v["kernel"], "gaussian");
    for key in [
        "input",
        "alpha",
        "d",
        "delta_max",
        "stationary_points",
        "timings_ms",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let p = &v["stationary_points"][0];
    for key in ["x", "y", "value", "class", "merged"] {
        assert!(p.get(key).is_some(), "missing point field {key}");
    }
}

#[test]
fn alpha_override_is_recorded_with_default() {
    let v = find_json(&["--fn", "f11", "--nx", "30", "--ny", "30", "--alpha", "3.5"]);
    assert_eq!(v["alpha"], 3.5);
    assert_eq!(v["alpha_overridden"], true);
    let d = v["d"].as_f64().unwrap();
    let expected = std::f64::consts::FRAC_1_SQRT_2 / (3.0 * d);
    assert!((v["alpha_default"].as_f64().unwrap() - expected).abs() < 1e-12);
}

#[test]
fn output_is_identical_across_thread_counts() {
    let run = |threads: &str| {
        statpoints()
            .args([
                "find",
                "--fn",
                "f13",
                "--kernel",
                "iq",
                "--nx",
                "60",
                "--ny",
                "60",
                "--threads",
                threads,
            ])
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn file_input_matches_function_input() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("f12.csv");
    statpoints()
        .args(["sample", "--fn", "f12", "--nx", "70", "--ny", "50", "-o"])
        .arg(&csv)
        .assert()
        .success();
    let from_fn = find_json(&["--fn", "f12", "--nx", "70", "--ny", "50"]);
    let from_file = find_json(&["--in", csv.to_str().unwrap()]);
    for key in ["stationary_points", "bindings", "counts", "alpha", "d"] {
        assert_eq!(from_fn[key], from_file[key], "{key} differs");
    }
}

#[test]
fn timings_only_on_request() {
    let v = find_json(&["--fn", "f11", "--nx", "20", "--ny", "20"]);
    assert!(v["timings_ms"].as_object().unwrap().is_empty());
    let v = find_json(&["--fn", "f11", "--nx", "20", "--ny", "20", "--timings"]);
    assert!(v["timings_ms"]["sweep"].as_f64().is_some());
}

#[test]
fn plot_draws_one_circle_per_isolated_point() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("f2.json");
    let svg = dir.path().join("f2.svg");
    statpoints()
        .args(["find", "--fn", "f2", "--json"])
        .arg(&report)
        .assert()
        .success();
    statpoints()
        .args(["plot", "--report"])
        .arg(&report)
        .arg("-o")
        .arg(&svg)
        .assert()
        .success();
    let text = fs::read_to_string(&svg).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    let circles = doc
        .descendants()
        .filter(|n| n.has_tag_name("circle"))
        .count();
    assert_eq!(circles, 24);
    assert!(doc
        .descendants()
        .any(|n| n.attribute("id") == Some("ground-truth")));
}

#[test]
fn plot_of_file_report_needs_field() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("f11.csv");
    let report = dir.path().join("f11.json");
    let svg = dir.path().join("f11.svg");
    statpoints()
        .args(["sample", "--fn", "f11", "--nx", "30", "--ny", "30", "-o"])
        .arg(&csv)
        .assert()
        .success();
    statpoints()
        .args(["find", "--in"])
        .arg(&csv)
        .arg("--json")
        .arg(&report)
        .assert()
        .success();
    statpoints()
        .args(["plot", "--report"])
        .arg(&report)
        .arg("-o")
        .arg(&svg)
        .assert()
        .code(2);
    statpoints()
        .args(["plot", "--report"])
        .arg(&report)
        .arg("--field")
        .arg(&csv)
        .arg("-o")
        .arg(&svg)
        .assert()
        .success();
    let text = fs::read_to_string(&svg).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    assert!(!doc
        .descendants()
        .any(|n| n.attribute("id") == Some("ground-truth")));
    assert_eq!(
        doc.descendants()
            .filter(|n| n.has_tag_name("polyline"))
            .count(),
        1
    );
}

#[test]
fn plot_rejects_mismatched_field() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("small.csv");
    let report = dir.path().join("r.json");
    statpoints()
        .args(["sample", "--fn", "f11", "--nx", "10", "--ny", "10", "-o"])
        .arg(&csv)
        .assert()
        .success();
    statpoints()
        .args(["find", "--fn", "f11", "--nx", "20", "--ny", "20", "--json"])
        .arg(&report)
        .assert()
        .success();
    statpoints()
        .args(["plot", "--report"])
        .arg(&report)
        .arg("--field")
        .arg(&csv)
        .arg("-o")
        .arg(dir.path().join("x.svg"))
        .assert()
        .code(2)
        .stderr(predicate::str::contains("inconsistent"));
}

#[test]
fn truth_export() {
    let out = statpoints()
        .args(["truth", "--fn", "f13", "--samples", "50"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["isolated"].as_array().unwrap().len(), 1);
    let curves = v["curves"].as_array().unwrap();
    assert_eq!(curves.len(), 7);
    assert_eq!(curves[0]["kind"], "arc");
    assert_eq!(curves[0]["samples"].as_array().unwrap().len(), 50);
}
