//! End-to-end checks of the nmx binary: exit codes and output shapes.

use std::path::PathBuf;
use std::process::Command;

fn nmx() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nmx"))
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("nmx-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn bounds_exit_codes() {
    let out = nmx()
        .args(["bounds", "--n", "1024", "--k", "512", "--d", "64", "--m", "8", "--eps", "0.0001"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["body"]["feasible"], true);

    let out = nmx()
        .args(["bounds", "--n", "256", "--k", "16", "--d", "64", "--m", "8", "--eps", "0.0001", "--r", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "infeasible parameters exit 1");

    let out = nmx().args(["bounds", "--n", "16"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "missing required args exit 2");

    let out = nmx().args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "unknown subcommand exits 2");
}

#[test]
fn audit_roundtrip() {
    let out = nmx()
        .args(["audit", "--claim", "preimage-sum", "--ell", "3", "--embed", "topbit"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["body"]["ok"], true);
    assert_eq!(v["body"]["functions_checked"], 81);
}

#[test]
fn sweep_from_config_with_assertion() {
    let cfg = serde_json::json!({
        "construction": { "RawIp": { "n": 6 } },
        "sources": { "PrefixZero": { "zeros": 1 } },
        "adversaries": "Counterexample",
        "mode": "Exhaustive",
        "seed": 1
    });
    let cfg_path = tmp("sweep.json");
    std::fs::write(&cfg_path, serde_json::to_string(&cfg).unwrap()).unwrap();

    let out = nmx()
        .args(["sweep", "--config", cfg_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["body"]["max_error"], "1/2");

    // the counterexample violates any bound below 1/2
    let out = nmx()
        .args(["sweep", "--config", cfg_path.to_str().unwrap(), "--assert-max", "0.4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_file(cfg_path).ok();
}

#[test]
fn protocol_emits_reports_csv_and_transcripts() {
    let report = tmp("protocol.json");
    let csv = tmp("robustness.csv");
    let lines = tmp("transcripts.jsonl");
    let out = nmx()
        .args([
            "protocol",
            "--preset",
            "micro",
            "--trials",
            "400",
            "--seed",
            "9",
            "--out",
            report.to_str().unwrap(),
            "--csv",
            csv.to_str().unwrap(),
            "--transcripts",
            lines.to_str().unwrap(),
            "--transcript-count",
            "5",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["body"]["correctness_failures"], 0);

    let csv_text = std::fs::read_to_string(&csv).unwrap();
    assert!(csv_text.starts_with("strategy,trials,"));

    let transcript_text = std::fs::read_to_string(&lines).unwrap();
    let rows: Vec<&str> = transcript_text.trim().lines().collect();
    assert_eq!(rows.len(), 5);
    for row in rows {
        let t: serde_json::Value = serde_json::from_str(row).unwrap();
        // widths are explicit so the format is bit-exact
        assert_eq!(t["sent1"]["y1"]["bits"], 5);
        assert_eq!(t["sent2"]["w"]["bits"], 4);
        assert!(t["outcome_a"]["Accept"]["key"]["hex"].is_string());
    }
    for p in [report, csv, lines] {
        std::fs::remove_file(p).ok();
    }
}
