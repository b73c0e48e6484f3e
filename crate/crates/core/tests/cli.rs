use std::path::{Path, PathBuf};
use std::process::Command;

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn nsf(args: &[&str], threads: Option<&str>) -> i32 {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nsf"));
    cmd.args(args);
    if let Some(t) = threads {
        cmd.env("NSF_THREADS", t);
    }
    cmd.output().unwrap().status.code().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_writes_every_artifact_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("one"), dir.path().join("four"));
    let cfg = bundled("small_data.toml");
    assert_eq!(nsf(&["solve", path(&cfg), "--out-dir", path(&a)], Some("1")), 0);
    assert_eq!(nsf(&["solve", path(&cfg), "--out-dir", path(&b)], Some("4")), 0);
    for f in ["fields_final.csv", "background.csv", "iterations.jsonl", "summary.json", "calibration.json"] {
        assert!(a.join(f).is_file(), "{f}");
    }
    let sa = std::fs::read(a.join("summary.json")).unwrap();
    assert_eq!(sa, std::fs::read(b.join("summary.json")).unwrap());

    let summary: serde_json::Value = serde_json::from_slice(&sa).unwrap();
    assert_eq!(summary["status"]["kind"], "converged");
    assert_eq!(summary["verdicts_pass"], true);
    let log = std::fs::read_to_string(a.join("iterations.jsonl")).unwrap();
    let lines: Vec<serde_json::Value> = log.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let steps = summary["steps"].as_u64().unwrap() as usize;
    assert!(lines[..steps].iter().all(|l| l["delta"].is_number()));
    assert!(lines[steps..].iter().all(|l| l["verdict"]["pass"] == true));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path());
    assert_eq!(nsf(&["solve", path(&bundled("background_only.toml")), "--out-dir", out], None), 0);
    assert_eq!(nsf(&["solve", path(&bundled("large_data.toml")), "--out-dir", out], None), 3);
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[grid]\nresolution = [16, 8]\n[iteration]\np = 2.0\n").unwrap();
    assert_eq!(nsf(&["solve", path(&bad), "--out-dir", out], None), 2);
    assert_eq!(nsf(&["solve", "/nonexistent.toml", "--out-dir", out], None), 2);
    assert_eq!(nsf(&["solve", path(&bundled("small_data.toml")), "--out-dir", out], Some("zero")), 2);
}

#[test]
fn study_reports_orders() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = bundled("small_data.toml");
    assert_eq!(nsf(&["study", path(&cfg), "--resolutions", "16,32,64", "--out-dir", path(dir.path())], None), 0);
    let table = std::fs::read_to_string(dir.path().join("study.csv")).unwrap();
    assert_eq!(table.lines().count(), 1 + 6 * 3);
}

#[test]
fn verify_writes_calibration() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = bundled("small_data.toml");
    assert_eq!(nsf(&["verify", path(&cfg), "--out-dir", path(dir.path())], None), 0);
    let cal: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("calibration.json")).unwrap()).unwrap();
    assert_eq!(cal["seed"], 1729);
    assert!(cal["constants"]["korn"]["constant"].as_f64().unwrap() > 0.0);
}
