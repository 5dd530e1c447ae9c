use serde_json::Value;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sasaki-spectra"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["run"];
    full.extend_from_slice(args);
    let out = bin(&full);
    let text = String::from_utf8(out.stdout).unwrap();
    let v = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    (out.status.code().unwrap(), v)
}

fn records(v: &Value) -> &Vec<Value> {
    v["records"].as_array().unwrap()
}

#[test]
fn torus_spectrum_report() {
    let (code, v) = run_json(&["--suite", "spectrum", "--immersion", "clifford-torus-s5", "--resolution", "128"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], 1);
    let s = &v["spectra"][0];
    assert_eq!(s["multiplicity"], 6);
    assert_eq!(s["bound"], 5);
    assert!(records(&v).iter().all(|r| r["status"] == "pass"));
    let mult = records(&v)
        .iter()
        .find(|r| r["name"] == "clifford-torus-s5 multiplicity at 6")
        .unwrap();
    assert_eq!(mult["anchor"], "Thm 2.1");
}

#[test]
fn moment_family_on_circle_passes() {
    let (code, v) = run_json(&["--suite", "moment-family", "--immersion", "geodesic-sphere-n1"]);
    assert_eq!(code, 0);
    for r in records(&v) {
        assert_ne!(r["status"], "fail", "{r}");
        if r["name"].as_str().unwrap().ends_with("eigen-residual") {
            assert!(r["value"].as_f64().unwrap() <= 1e-6);
        }
    }
}

#[test]
fn reeb_generator_is_degenerate_and_exits_zero() {
    let (code, v) = run_json(&["--suite", "nomizu-family", "--immersion", "clifford-torus-s5", "--generator", "reeb"]);
    assert_eq!(code, 0);
    let eig = records(&v)
        .iter()
        .find(|r| r["name"].as_str().unwrap().ends_with("eigen-residual"))
        .unwrap();
    assert_eq!(eig["status"], "degenerate");
    assert_eq!(eig["anchor"], "Thm 3.9");
}

#[test]
fn every_record_has_an_anchor() {
    let (_, v) = run_json(&["--suite", "legendrian-geometry"]);
    assert!(!records(&v).is_empty());
    for r in records(&v) {
        assert!(!r["anchor"].as_str().unwrap().is_empty());
    }
}

#[test]
fn list_targets() {
    let out = bin(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("n = 2: dim u(3) = 9"));
    for name in ["geodesic-sphere-n2", "clifford-torus-s5", "great-circle-s3"] {
        assert!(text.contains(name));
    }
    let suites: Vec<&str> = text
        .lines()
        .skip_while(|l| *l != "suites:")
        .skip(1)
        .take_while(|l| l.starts_with("  "))
        .map(str::trim)
        .collect();
    assert_eq!(
        suites,
        ["sasaki-axioms", "legendrian-geometry", "moment-family", "nomizu-family", "relation", "spectrum", "all"]
    );
}

#[test]
fn usage_errors_exit_64() {
    for args in [
        vec!["run", "--suite", "bogus"],
        vec!["run", "--immersion", "klein-bottle"],
        vec!["run", "--tolerance", "nope=1"],
        vec!["run", "--tolerance", "legendrian"],
        vec!["run", "--format", "xml"],
        vec!["run", "--n", "7"],
        vec!["frobnicate"],
    ] {
        let out = bin(&args);
        assert_eq!(out.status.code(), Some(64), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn overrides_are_echoed() {
    let (_, v) = run_json(&["--suite", "legendrian-geometry", "--n", "1", "--tolerance", "legendrian=1e-9"]);
    assert_eq!(v["config"]["tolerances"]["legendrian"], 1e-9);
    let r = records(&v).iter().find(|r| r["name"] == "great-circle-s3 legendrian").unwrap();
    assert_eq!(r["threshold"], 1e-9);
}

#[test]
fn failing_threshold_exits_one() {
    let (code, _) = run_json(&["--suite", "spectrum", "--immersion", "great-circle-s3", "--tolerance", "cluster=1e-12"]);
    assert_eq!(code, 1);
}

#[test]
fn out_of_range_resolution_is_inconclusive() {
    let (code, v) = run_json(&["--suite", "spectrum", "--immersion", "great-circle-s3", "--resolution", "16"]);
    assert_eq!(code, 2);
    assert!(records(&v).iter().any(|r| r["status"] == "inconclusive"));
}

#[test]
fn reports_are_byte_identical() {
    let args = ["run", "--suite", "sasaki-axioms", "--n", "1", "--seed", "3"];
    assert_eq!(bin(&args).stdout, bin(&args).stdout);
}

#[test]
fn timing_is_opt_in() {
    let (_, v) = run_json(&["--suite", "sasaki-axioms", "--n", "1"]);
    assert!(v.get("wall_time_seconds").is_none());
    let (_, v) = run_json(&["--suite", "sasaki-axioms", "--n", "1", "--timing"]);
    assert!(v["wall_time_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn csv_spectrum_dump_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spectrum.csv");
    let out = bin(&[
        "run",
        "--suite",
        "spectrum",
        "--immersion",
        "great-circle-s3",
        "--resolution",
        "256",
        "--format",
        "csv",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("immersion,resolution,index,eigenvalue"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[..3], ["great-circle-s3", "256", "0"]);
    assert!(first[3].parse::<f64>().unwrap().abs() < 1e-12);
}

#[test]
fn csv_field_dump_for_moment_family() {
    let out = bin(&["run", "--suite", "moment-family", "--immersion", "great-circle-s3", "--generator", "1", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("immersion,generator,node,weight,value\n"));
    assert_eq!(text.lines().count(), 1 + 64);
}
