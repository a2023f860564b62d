use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cylres(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cylres")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn identity_suite_default_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("id");
    let o = cylres(&["identity-suite", "--config", "default", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["all_pass"], true);
    assert!(fs::read_to_string(out.join("results.csv")).unwrap().starts_with("experiment,l,method,"));
}

#[test]
fn unknown_experiment_prints_usage() {
    let o = cylres(&["no-such-run", "--config", "default"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("usage: cylres"));
}

#[test]
fn list_names_every_experiment() {
    let o = cylres(&["--list"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    for e in cylres::experiments::Experiment::ALL {
        assert!(text.contains(e.name()), "{e} missing from --list");
    }
    assert!(text.contains("well_bump"));
}

#[test]
fn failed_criterion_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = cylres(&["example-logl", "--config", "default", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn bad_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"experiment":"free-baseline","potential":{"builtin":"zero"},"l":[3],"k":[4]}"#).unwrap();
    let out = dir.path().join("out");
    let o = cylres(&["free-baseline", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["partial"], true);
    assert_eq!(code(&cylres(&["free-baseline", "--config", "/nonexistent.json"])), 1);
}

fn csv_with_threads(dir: &Path, experiment: &str, threads: &str) -> Vec<u8> {
    let out = dir.join(format!("{experiment}-{threads}"));
    let o = cylres(&[experiment, "--config", "default", "--threads", threads, "--out", out.to_str().unwrap()]);
    assert!(matches!(code(&o), 0 | 2), "{}", String::from_utf8_lossy(&o.stderr));
    fs::read(out.join("results.csv")).unwrap()
}

#[test]
fn csv_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    for e in ["example-threshold", "decoupled-check", "leading-correction"] {
        let one = csv_with_threads(dir.path(), e, "1");
        let four = csv_with_threads(dir.path(), e, "4");
        assert!(!one.is_empty());
        assert_eq!(one, four, "{e}: CSV differs between 1 and 4 threads");
    }
}
