use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sticks(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sticks"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(code(&sticks(&["--help"])), 0);
    assert_eq!(code(&sticks(&["--version"])), 0);
}

#[test]
fn bad_input_is_a_config_error() {
    assert_eq!(code(&sticks(&["frobnicate"])), 1);
    assert_eq!(code(&sticks(&["onev", "--p", "0.5"])), 1);
    assert_eq!(code(&sticks(&["sticks", "--norm", "p:0.5"])), 1);
    assert_eq!(
        code(&sticks(&["onev", "--p", "3", "--tolerance", "nope=1"])),
        1
    );
    assert_eq!(
        code(&sticks(&[
            "sticks",
            "--norm",
            "euclidean",
            "--samples",
            "0"
        ])),
        1
    );
}

#[test]
fn too_few_sticks_is_degenerate() {
    let out = sticks(&["sticks", "--norm", "euclidean", "--family", "1"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn violations_exit_3_and_still_write_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("pairs.csv");
    // a predicate slack below rounding level flags rounding noise
    let out = sticks(&[
        "sticks",
        "--norm",
        "euclidean",
        "--tolerance",
        "predicate=1e-300",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.lines().skip(1).any(|l| l.ends_with(",true")));
    let meta = read_json(&dir.path().join("pairs.csv.meta.json"));
    assert!(meta["summary"]["violations"].as_u64().unwrap() > 0);
}

#[test]
fn sticks_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("pairs.csv");
    let out = sticks(&[
        "sticks",
        "--norm",
        "euclidean",
        "--family",
        "30",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "i,j,s,t,two_sticks,chain,monotonicity,interp_residual,lipschitz_ratio,holder_ratio,violation"
    );
    assert!(lines.all(|l| l.ends_with(",false")));
    let meta = read_json(&dir.path().join("pairs.csv.meta.json"));
    assert_eq!(meta["config"]["command"], "sticks");
    assert_eq!(meta["config"]["params"]["family"], 30);
    assert!(meta["timestamp"].is_string());
    assert_eq!(meta["summary"]["violations"], 0);
}

#[test]
fn config_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"command": "onev", "seed": 4, "params": {"p": 3.0, "points": 500},
            "tolerances": {"bound": 1e-8}}"#,
    )
    .unwrap();
    let report = dir.path().join("onev.json");
    let out = sticks(&[
        "onev",
        "--p",
        "1.5",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = read_json(&report);
    assert_eq!(doc["config"]["params"]["p"], 3.0);
    assert_eq!(doc["config"]["params"]["points"], 500);
    assert_eq!(doc["config"]["seed"], 4);
    assert_eq!(doc["config"]["tolerances"]["bound"], 1e-8);
    assert!(doc["result"]["inf_double_ratio"].as_f64().unwrap() > 2.0);
}

#[test]
fn config_file_rejects_unknown_keys_and_other_commands() {
    let dir = tempfile::tempdir().unwrap();
    for body in [
        r#"{"bogus": 1}"#,
        r#"{"params": {"bogus": 1}}"#,
        r#"{"command": "strip"}"#,
        "[1]",
    ] {
        let cfg = dir.path().join("bad.json");
        std::fs::write(&cfg, body).unwrap();
        let out = sticks(&["onev", "--p", "3", "--config", cfg.to_str().unwrap()]);
        assert_eq!(code(&out), 1, "{body}");
    }
}

#[test]
fn sharpness_to_stdout() {
    let out = sticks(&["sharpness", "--p", "4", "--points", "6"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "parameter,gap_norm,m_norm,ratio"
    );
    assert_eq!(text.lines().count(), 7);
    let summary: Value = serde_json::from_str(String::from_utf8_lossy(&out.stderr).trim()).unwrap();
    assert!(summary.is_object());
}

#[test]
fn certify_writes_an_envelope() {
    let out = sticks(&[
        "certify",
        "--norm",
        "p:3",
        "--dim",
        "2",
        "--samples",
        "2000",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["config"]["command"], "certify");
    assert!(doc["result"].is_object());
}

#[test]
fn strip_and_atlas_run() {
    let out = sticks(&[
        "strip",
        "--norm",
        "euclidean",
        "--configs",
        "10",
        "--samples",
        "5000",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = sticks(&["atlas", "--norm", "p:3", "--queries", "30"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn same_seed_same_output() {
    let run = || {
        sticks(&[
            "sticks", "--norm", "p:3", "--dim", "3", "--family", "20", "--seed", "7",
        ])
        .stdout
    };
    assert_eq!(run(), run());
    let other = sticks(&[
        "sticks", "--norm", "p:3", "--dim", "3", "--family", "20", "--seed", "8",
    ])
    .stdout;
    assert_ne!(run(), other);
}
