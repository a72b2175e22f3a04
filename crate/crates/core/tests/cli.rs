//! End-to-end runs of the `crot` binary.

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use complex_rotation::io::{from_csv, BubbleRow, CycleRow, TauRow};
use complex_rotation::linearizer::SigmaData;
use tempfile::TempDir;

const ARNOLD: &str = r#"{"mean_shift": 0.0, "cos": [0.0], "sin": [0.07957747154594767]}"#;

fn crot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crot")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    assert_eq!(o.status.code(), Some(0), "stderr: {}", stderr(o));
    serde_json::from_str(&stdout(o)).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn tau_on_a_rotation() {
    let v = json(&crot(&["tau", "--map", r#"{"mean_shift": 0.3}"#, "--omega", "0.1,0.2"]));
    assert!((v["tau_re"].as_f64().unwrap() - 0.4).abs() < 1e-12);
    assert!((v["tau_im"].as_f64().unwrap() - 0.2).abs() < 1e-12);
    let o = crot(&["tau", "--map", r#"{"mean_shift": 0.3}"#, "--omega", "0.1,0.2", "--n", "8", "--emit", "csv"]);
    let rows: Vec<TauRow> = from_csv(&stdout(&o)).unwrap();
    assert_eq!((rows[0].n, rows[0].m), (8, 36));
    rows[0].validate().unwrap();
}

#[test]
fn weld_on_a_rotation() {
    let v = json(&crot(&["weld", "--map", r#"{"mean_shift": 0.25}"#]));
    assert!((v["c_f_re"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert!(v["c_f_im"].as_f64().unwrap().abs() < 1e-12);
    assert_eq!(v["N"], 64);
    assert_eq!(v["M"], 260);
}

#[test]
fn trace_rows_lie_in_the_disk() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let o = crot(&["trace", "--map", ARNOLD, "--pq", "0/1", "--samples", "8", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows: Vec<BubbleRow> = from_csv(&std::fs::read_to_string(out.join("trace.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 8);
    // D_f = int |F''/F'| = 2 ln 3 for F' = 1 + cos(2 pi x) / 2
    let radius = 2.0 * 3f64.ln() / (4.0 * PI);
    for r in &rows {
        r.validate().unwrap();
        assert!(r.h <= 2.0 * radius + 1e-6, "{r:?}");
    }
    let svg = std::fs::read_to_string(out.join("trace.svg")).unwrap();
    assert!(svg.contains("exaggerated 10x"));
    let trace: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("trace.json")).unwrap()).unwrap();
    assert_eq!(trace["components"][0]["left"]["kind"], "real");
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str, workers: &str| {
        let out = dir.path().join(name);
        let args = ["atlas", "--map", ARNOLD, "--samples", "6", "--workers", workers, "--out", out.to_str().unwrap()];
        assert_eq!(crot(&args).status.code(), Some(0));
        ["atlas.csv", "atlas.json", "atlas.svg"].map(|f| std::fs::read(out.join(f)).unwrap())
    };
    assert_eq!(run("a", "1"), run("b", "3"));
    let rows: Vec<BubbleRow> = from_csv(&String::from_utf8(run("c", "2")[0].clone()).unwrap()).unwrap();
    rows.iter().for_each(|r| r.validate().unwrap());
}

#[test]
fn cycles_and_sigma() {
    let o = crot(&["cycles", "--map", ARNOLD, "--pq", "0/1"]);
    let rows: Vec<CycleRow> = from_csv(&stdout(&o)).unwrap();
    assert_eq!(rows.len(), 2);
    rows.iter().for_each(|r| r.validate().unwrap());
    let o = crot(&["sigma", "--map", ARNOLD, "--pq", "0/1"]);
    let data: SigmaData = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(data.alphas.len(), 2);
    assert!((data.sigma.im - 12.28049).abs() < 1e-4);
}

#[test]
fn rot_and_boundary() {
    let v = json(&crot(&["rot", "--map", r#"{"mean_shift": 0.25}"#]));
    assert_eq!((v["rational"].as_bool(), v["p"].as_i64(), v["q"].as_i64()), (Some(true), Some(1), Some(4)));
    let v = json(&crot(&["boundary", "--map", ARNOLD, "--omega", "0"]));
    assert!((v["tau_im"].as_f64().unwrap() - 0.0814330).abs() < 1e-5);
    assert!(v["tau_re"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn json_config_overrides_flags() {
    let dir = TempDir::new().unwrap();
    let map = write(dir.path(), "map.json", r#"{"mean_shift": 0.3}"#);
    let cfg = write(dir.path(), "cfg.json", r#"{"omega": [0.2, 0.5], "n": 16}"#);
    let v = json(&crot(&["tau", "--map", &map, "--omega", "0.1,0.2", "--n", "8", "--config", &cfg]));
    assert!((v["tau_re"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((v["tau_im"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(v["N"], 16);
}

#[test]
fn validation_errors_exit_2() {
    let rot = r#"{"mean_shift": 0.3}"#;
    for args in [
        vec!["tau", "--map", rot, "--omega", "0.1,0.2", "--n", "7"],
        vec!["tau", "--map", rot, "--omega", "0.1,0.2", "--n", "8", "--m", "35"],
        vec!["tau", "--omega", "0.1,0.2"],
        vec!["tau", "--map", rot, "--omega", "0.1,-0.2"],
        vec!["rot", "--map", rot, "--tol", "0"],
        vec!["rot", "--map", rot, "--emit", "svg"],
        vec!["cycles", "--map", rot, "--pq", "2/4"],
        vec!["boundary", "--map", rot, "--omega", "0", "--ladder", "0.01,0.02"],
        vec!["tsujii", "--map", rot],
        vec!["frobnicate"],
    ] {
        let o = crot(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn numerical_errors_exit_3_with_the_error_name() {
    let o = crot(&["cycles", "--map", ARNOLD, "--pq", "1/2"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("WrongRotationNumber"));
    let o = crot(&["sigma", "--map", r#"{"mean_shift": 0.0}"#, "--pq", "0/1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("NotHyperbolic"), "{}", stderr(&o));
    let o = crot(&["rot", "--map", r#"{"mean_shift": 0.0, "sin": [0.5]}"#]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("NotADiffeomorphism"));
}
