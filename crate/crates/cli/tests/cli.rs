use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/products").join(name)
}

fn matchwork(project: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matchwork"))
        .arg("-C")
        .arg(project)
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(project: &Path, args: &[&str]) -> Value {
    let out = matchwork(project, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

const PRICE_GAP: &str = r#"
name = "price_gap"
origin = "user"

[rule]
comparator = "absolute-diff-gt(200)"
when_true = -1
when_false = 0
when_missing = 0

[rule.extract_left]
attrs = ["price"]
pattern = "([0-9]+(?:\\.[0-9]+)?)"

[rule.extract_right]
attrs = ["price"]
pattern = "([0-9]+(?:\\.[0-9]+)?)"
"#;

#[test]
fn command_line_workflow() {
    let dir = tempfile::tempdir().unwrap();
    let project = dir.path().join("p");
    let left = fixture("left.csv");
    let right = fixture("right.csv");
    let matches = fixture("matches.csv");
    let report = json(
        &project,
        &["init", left.to_str().unwrap(), right.to_str().unwrap(), "--matches", matches.to_str().unwrap()],
    );
    assert!(!report["auto_lfs"].as_array().unwrap().is_empty());

    let spec = dir.path().join("price_gap.toml");
    std::fs::write(&spec, PRICE_GAP).unwrap();
    let entry = json(&project, &["lf", "add", spec.to_str().unwrap()]);
    assert_eq!(entry["name"], "price_gap");
    let out = matchwork(&project, &["lf", "show", "price_gap"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("absolute-diff-gt(200)"));

    let outcome = json(&project, &["apply"]);
    assert_eq!(outcome["report"]["recomputed"], serde_json::json!(["price_gap"]));
    let listed = json(&project, &["lf", "ls"]);
    let row = listed.as_array().unwrap().iter().find(|r| r["name"] == "price_gap").unwrap();
    assert!(row["stats"]["est_fpr"].is_number());

    let sample = json(&project, &["sample", "precision", "-n", "4"]);
    for record in sample.as_array().unwrap() {
        let (l, r) = (record["left_id"].as_str().unwrap(), record["right_id"].as_str().unwrap());
        json(&project, &["label", l, r, "match"]);
    }
    let stats = json(&project, &["stats"]);
    assert_eq!(stats["estimated_precision"]["precision"], 1.0);
    assert_eq!(stats["estimated_precision"]["n_labeled"], 4);
    assert!(stats["blocking_recall"].as_f64().unwrap() > 0.9);

    let record = &sample[0];
    let (l, r) = (record["left_id"].as_str().unwrap(), record["right_id"].as_str().unwrap());
    let trace = json(&project, &["lf", "trace", "price_gap", l, r]);
    assert_eq!(trace["kind"], "rule");
    json(&project, &["drill", "price_gap", "fp"]);

    let out = matchwork(&project, &["export"]);
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count() as u64, stats["matches_found"].as_u64().unwrap() + 1);
    let file = dir.path().join("out.csv");
    assert!(matchwork(&project, &["export", "-o", file.to_str().unwrap()]).status.success());
    assert_eq!(std::fs::read_to_string(file).unwrap(), csv);

    assert!(matchwork(&project, &["lf", "rm", "price_gap"]).status.success());
    let out = matchwork(&project, &["lf", "rm", "price_gap"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown labeling function"));
}

#[test]
fn errors_exit_nonzero_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let out = matchwork(dir.path(), &["stats"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: project not found"));
    let missing = dir.path().join("missing.csv");
    let out = matchwork(&dir.path().join("p"), &["init", missing.to_str().unwrap(), missing.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("file not found"));
}
