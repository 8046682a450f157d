use std::path::Path;
use std::process::{Command, Output};

fn tehier(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tehier"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn tehier")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = tehier(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

/// Small synthetic dataset: `s.fa` and its features `s.csv`.
fn synth_dir(per_node: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["synth", "--per-node", per_node, "--length", "400", "--seed", "11", "--out", "s.fa"]);
    ok(dir.path(), &["featurize", "--input", "s.fa", "--out", "s.csv"]);
    dir
}

#[test]
fn featurize_two_sequences() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("two.fa"), ">a 1.1\nACGTACGTTT\n>b 2\nGGGCCCAATT\n").unwrap();
    ok(d, &["featurize", "--input", "two.fa", "--out", "two.csv"]);
    let text = read(d, "two.csv");
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0].split(',').count(), 337);
    assert!(lines[0].starts_with("AA,AC,AG,AT,"));
    assert!(lines[0].ends_with(",TTTT,label"));
    assert!(lines[1].ends_with(",1.1"));

    std::fs::write(d.join("plain.fa"), ">a\nACGTACGTTT\n>b\nGGGCCCAATT\n").unwrap();
    ok(d, &["featurize", "--input", "plain.fa", "--out", "plain.csv"]);
    let header = read(d, "plain.csv").lines().next().unwrap().to_string();
    assert_eq!(header.split(',').count(), 336);
}

#[test]
fn featurize_rejects_empty_input() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("empty.fa"), "").unwrap();
    let out = tehier(dir.path(), &["featurize", "--input", "empty.fa", "--out", "e.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no sequences"));
}

#[test]
fn cv_report_has_fold_and_mean_rows() {
    let dir = synth_dir("10");
    let d = dir.path();
    let stdout = ok(d, &["cv", "--input", "s.csv", "--base", "svm", "--strategy", "lcpnb", "--out", "cv.csv"]);
    assert!(stdout.starts_with("seed: 42\n"));
    let report = read(d, "cv.csv");
    let lines: Vec<&str> = report.lines().collect();
    assert_eq!(lines[0], "fold,strategy,base,hP,hR,hF,hF_L1,hF_L2,hF_L3,hF_L4");
    assert_eq!(lines.len(), 1 + 10 + 1);
    assert!(lines[11].starts_with("mean,lcpnb,svm,"));

    let out = tehier(d, &["cv", "--input", "s.csv", "--folds", "100000"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("folds"));
}

#[test]
fn compare_emits_four_rows() {
    let dir = synth_dir("10");
    let d = dir.path();
    ok(d, &["compare", "--input", "s.csv", "--folds", "5", "--out", "cmp.csv"]);
    let text = read(d, "cmp.csv");
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "base,strategy,hF_mean,hF_std");
    assert_eq!(lines.len(), 5);
    for line in &lines[1..] {
        let hf: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!((0.0..=1.0).contains(&hf));
    }
}

#[test]
fn train_predict_evaluate_roundtrip() {
    let dir = synth_dir("20");
    let d = dir.path();
    ok(d, &["train", "--input", "s.csv", "--out", "m.json"]);
    ok(d, &["predict", "--model", "m.json", "--input", "s.csv", "--out", "p.csv"]);
    let summary = ok(d, &["evaluate", "--pred", "p.csv", "--truth", "s.csv"]);
    let hf: f64 = summary
        .lines()
        .find_map(|l| l.strip_prefix("hF: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(hf >= 0.99, "training hF {hf}");

    // Predictions from FASTA carry sequence ids.
    ok(d, &["predict", "--model", "m.json", "--input", "s.fa", "--strategy", "nllcpn", "--out", "pf.csv"]);
    assert!(read(d, "pf.csv").lines().nth(1).unwrap().starts_with("syn"));
}

#[test]
fn evaluate_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("a.csv"), "id,label\nx,1.1\ny,2\nz,1.2.3\n").unwrap();
    let summary = ok(d, &["evaluate", "--pred", "a.csv", "--truth", "a.csv", "--out", "m.csv"]);
    assert!(summary.contains("hF: 1.000000"));
    assert_eq!(read(d, "m.csv").lines().next().unwrap(), "hP,hR,hF,hF_L1,hF_L2,hF_L3");
}

#[test]
fn predict_with_other_featurization_is_a_fingerprint_error() {
    let dir = synth_dir("5");
    let d = dir.path();
    ok(d, &["train", "--input", "s.csv", "--base", "logreg", "--out", "m.json"]);
    ok(d, &["featurize", "--input", "s.fa", "--kmers", "2,3", "--out", "small.csv"]);
    let out = tehier(d, &["predict", "--model", "m.json", "--input", "small.csv", "--out", "p.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("fingerprint"));
}

#[test]
fn gridsearch_reports_every_cell() {
    let dir = synth_dir("8");
    let d = dir.path();
    std::fs::write(d.join("g.json"), r#"{"c": [1, 8], "gamma": [4, 16]}"#).unwrap();
    let stdout = ok(d, &["gridsearch", "--input", "s.csv", "--grid", "g.json", "--folds", "3", "--out", "g.csv"]);
    assert!(stdout.contains("selected: C="));
    let text = read(d, "g.csv");
    assert_eq!(text.lines().count(), 1 + 4);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",ok")));
}

#[test]
fn usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(tehier(d, &["frobnicate"]).status.code(), Some(1));
    assert_eq!(tehier(d, &["cv", "--input", "x.csv", "--norm", "log"]).status.code(), Some(1));
    let out = tehier(d, &["cv", "--input", "x.csv", "--base", "logreg", "--gamma", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(tehier(d, &["gridsearch", "--input", "x.csv", "--grid", "huge"]).status.code(), Some(1));
    let missing = tehier(d, &["cv", "--input", "missing.csv"]);
    assert_eq!(missing.status.code(), Some(2));
}
