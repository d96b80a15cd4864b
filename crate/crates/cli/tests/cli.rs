use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fracstiff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracstiff")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn kernel_table_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k.txt");
    let out = fracstiff(&["kernel", "--alpha", "0.5", "--eps", "1e-5", "--t-end", "1000", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let summary = String::from_utf8(out.stdout).unwrap();
    assert!(summary.contains("M -44  N 37  terms 81"), "{summary}");
    let table = std::fs::read_to_string(&path).unwrap();
    let header = table.lines().next().unwrap();
    assert!(header.starts_with('#') && header.ends_with("-44 37"), "{header}");
    assert_eq!(table.lines().filter(|l| !l.starts_with('#')).count(), 81);
}

#[test]
fn kernel_rejects_bad_parameters() {
    let out = fracstiff(&["kernel", "--alpha", "1.5", "--eps", "1e-5", "--t-end", "1"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("alpha must lie in (0,1)"));
    assert!(stderr(&out).contains("use the solver's split for alpha>1"));
    let out = fracstiff(&["kernel", "--alpha", "0.1", "--eps", "0.9", "--t_end", "1"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn solve_example1_reports_error() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("a.csv");
    let stats = dir.path().join("a.json");
    let out = fracstiff(&[
        "solve", "--problem", "example1", "--alpha", "0.5", "--tol", "1e-7", "--eps", "1e-7",
        "--out-csv", csv.to_str().unwrap(), "--out-stats", stats.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc = read_json(&stats);
    assert_eq!(doc["status"], "success");
    assert!(doc["error"].as_f64().unwrap() <= 5e-6);
    assert_eq!(doc["kernels"][0]["M"], -63);
    assert_eq!(doc["config"]["linalg"], "structured");
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "t,y_1,err");
    assert!(lines[1].starts_with("1e0,"));
}

#[test]
fn solve_brusselator_against_reference() {
    let dir = tempfile::tempdir().unwrap();
    let stats = dir.path().join("b.json");
    let out = fracstiff(&["solve", "--problem", "brusselator", "--tol", "1e-6", "--out-stats", stats.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,y_1,y_2");
    let doc = read_json(&stats);
    assert!(doc["error"].as_f64().unwrap() <= 5e-4);
    assert_eq!(doc["error_measure"], "relative_components");
}

#[test]
fn outputs_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for k in 0..2 {
        let csv = dir.path().join(format!("{k}.csv"));
        let stats = dir.path().join(format!("{k}.json"));
        let out = fracstiff(&[
            "solve", "--problem", "multiterm", "--t-end", "20", "--tol", "1e-6", "--outputs", "7",
            "--out-csv", csv.to_str().unwrap(), "--out-stats", stats.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        let mut doc = read_json(&stats);
        doc["wall_time"] = Value::Null;
        runs.push((std::fs::read(&csv).unwrap(), doc));
    }
    assert_eq!(runs[0], runs[1]);
    assert_eq!(String::from_utf8_lossy(&runs[0].0).lines().count(), 8);
}

#[test]
fn config_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# pde run\nproblem = pde1d\ngrid_d = 10\nalpha = 1/3\ntol = 1e-5\n").unwrap();
    let stats = dir.path().join("s.json");
    let out = fracstiff(&["solve", "--config", cfg.to_str().unwrap(), "--out-stats", stats.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc = read_json(&stats);
    assert_eq!(doc["dimension"]["head"], 10);
    assert_eq!(doc["config"]["linalg"], "banded");
    assert_eq!(doc["config"]["eps"], 1e-5);

    // a config path in place of the problem name, with a flag override
    let out = fracstiff(&["solve", "--problem", cfg.to_str().unwrap(), "--grid-d", "12"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let header = String::from_utf8(out.stdout).unwrap().lines().next().unwrap().to_string();
    assert!(header.ends_with("y_12,err"), "{header}");

    std::fs::write(&cfg, "problem = pde1d\nspeed = 3\n").unwrap();
    let out = fracstiff(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("unknown key 'speed'"));
}

#[test]
fn input_errors_and_assertions() {
    assert_eq!(code(&fracstiff(&["solve", "--problem", "nonsense"])), 2);
    assert_eq!(code(&fracstiff(&["solve", "--problem", "decay", "--tol", "1.5"])), 2);
    assert_eq!(code(&fracstiff(&["solve", "--problem", "decay", "--alpha", "0.5"])), 2);
    assert_eq!(code(&fracstiff(&["solve", "--problem", "decay", "--outputs", "0"])), 2);
    let out = fracstiff(&["solve", "--problem", "example1", "--tol", "1e-3", "--max-error", "1e-12"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("exceeds max_error"));
    let out = fracstiff(&["solve", "--problem", "reaction_diffusion", "--grid-d", "5", "--max-error", "1"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn bench_compares_modes() {
    let out = fracstiff(&["bench", "--problem", "decay", "--tol", "1e-8"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("agreement 0.000e0"), "{text}");
    assert!(text.contains("speedup"));

    let dir = tempfile::tempdir().unwrap();
    let stats = dir.path().join("bench.json");
    let out = fracstiff(&["bench", "--problem", "example1", "--tol", "1e-8", "--out-stats", stats.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc = read_json(&stats);
    assert!(doc["agreement"].as_f64().unwrap() <= 1e-10);
    assert_eq!(doc["dense"]["config"]["linalg"], "dense");
    assert_eq!(doc["fast"]["config"]["linalg"], "structured");

    assert_eq!(code(&fracstiff(&["bench", "--problem", "decay", "--linalg", "dense"])), 2);
}

#[test]
fn list_descriptors() {
    let out = fracstiff(&["list", "--json"]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let names: Vec<&str> = doc.as_array().unwrap().iter().map(|p| p["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["example1", "brusselator", "multiterm", "pde1d", "reaction_diffusion", "decay"]);
    assert_eq!(doc[3]["parameters"][2]["name"], "grid_d");
    let out = fracstiff(&["list"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("truth: none"));
}
