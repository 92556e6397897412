//! End-to-end checks of the binary: exit codes, reproducibility of
//! artifacts, and the exhaustion error path.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qgsm"))
}

fn tmp(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn read_dir_sorted(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    files
}

#[test]
fn tri_runs_are_byte_identical_for_one_seed() {
    let dir_a = tmp("tri-a");
    let dir_b = tmp("tri-b");
    for dir in [&dir_a, &dir_b] {
        let status = bin()
            .args(["tri", "--seed", "11", "--trials", "25", "--quiet", "--out"])
            .arg(dir)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let files_a = read_dir_sorted(&dir_a.join("tri"));
    let files_b = read_dir_sorted(&dir_b.join("tri"));
    assert_eq!(files_a.len(), files_b.len());
    assert!(files_a.len() >= 4);
    for (a, b) in files_a.iter().zip(files_b.iter()) {
        assert_eq!(a.file_name(), b.file_name());
        assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap(), "{a:?}");
    }
    // Every artifact names its seed and config hash.
    for a in &files_a {
        let body = fs::read_to_string(a).unwrap();
        let first = body.lines().next().unwrap();
        assert!(first.contains("seed=11") || first.contains("\"seed\":11"), "{a:?}: {first}");
        assert!(first.contains("config_hash"), "{a:?}");
    }
}

#[test]
fn different_seeds_differ() {
    let dir_a = tmp("tri-seed-a");
    let dir_b = tmp("tri-seed-b");
    for (dir, seed) in [(&dir_a, "1"), (&dir_b, "2")] {
        let status = bin()
            .args(["tri", "--seed", seed, "--trials", "10", "--quiet", "--out"])
            .arg(dir)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = fs::read(dir_a.join("tri/transcript.jsonl")).unwrap();
    let b = fs::read(dir_b.join("tri/transcript.jsonl")).unwrap();
    assert_ne!(a, b);
}

#[test]
fn fixtures_pass_and_exit_zero() {
    let out = bin().arg("fixtures").output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("memory-challenge-key: PASS"));
    assert!(!stdout.contains("FAIL"));
}

#[test]
fn missing_config_exits_two() {
    let dir = tmp("badcfg");
    let status = bin()
        .args(["qmem", "--config", "/definitely/not/here.json", "--out"])
        .arg(&dir)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn malformed_config_exits_two() {
    let dir = tmp("badjson");
    let cfg = dir.join("cfg.json");
    fs::write(&cfg, "{\"n\": \"many\"}").unwrap();
    let status = bin()
        .args(["qmem", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&dir)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn memory_exhaustion_exits_one_with_flagged_partial_artifacts() {
    let dir = tmp("exhaust");
    let cfg = dir.join("cfg.json");
    fs::write(&cfg, r#"{"n": 100, "m": 10, "trials": 50, "seed": 4}"#).unwrap();
    let out = bin()
        .args(["qmem", "--quiet", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("exhausted"), "{stderr}");
    let summary = fs::read_to_string(dir.join("qmem/summary.txt")).unwrap();
    assert!(summary.contains("incomplete"));
    assert!(summary.contains("trials_run 10"));
}

#[test]
fn stats_aggregates_prior_verdicts() {
    let dir = tmp("stats");
    let status = bin()
        .args(["tri", "--seed", "3", "--trials", "20", "--quiet", "--out"])
        .arg(&dir)
        .status()
        .unwrap();
    assert!(status.success());
    let out = bin().args(["stats", "--out"]).arg(&dir).output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("outcome:clone-detected"), "{stdout}");
    assert!(dir.join("stats.txt").exists());
}

#[test]
fn e91_summary_reports_identical_keys() {
    let dir = tmp("e91");
    let cfg = dir.join("cfg.json");
    fs::write(&cfg, r#"{"pairs": 800, "disclose_fraction": 0.1, "seed": 9}"#).unwrap();
    let out = bin()
        .args(["e91", "--format", "jsonl", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("\"keys_identical\":\"true\""), "{stdout}");
    assert!(dir.join("e91/keys.txt").exists());
}
