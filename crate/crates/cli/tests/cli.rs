use std::path::Path;
use std::process::{Command, Output};

fn dogfight(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dogfight")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = dogfight(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn small_config(dir: &Path) -> String {
    let path = dir.join("small.toml");
    std::fs::write(&path, "batch_size = 16\nhidden = [16, 8]\nbuffer_capacity = 500\ncheckpoint_every = 100\n").unwrap();
    path.to_str().unwrap().to_owned()
}

fn read(path: impl AsRef<Path>) -> String {
    std::fs::read_to_string(path.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", path.as_ref().display()))
}

#[test]
fn train_twice_with_the_same_seed_gives_identical_logs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        ok(&["train", "--config", &cfg, "--steps", "200", "--seed", "7", "--out", out.to_str().unwrap()]);
    }
    for f in ["train_log.csv", "outcome_curve.csv", "checkpoint_final.json", "checkpoint_100.json"] {
        assert_eq!(read(a.join(f)), read(b.join(f)), "{f}");
    }
    let log = read(a.join("train_log.csv"));
    assert_eq!(log.lines().count(), 201);
    // resolved config records the flag overrides
    let resolved = read(a.join("config.toml"));
    assert!(resolved.contains("seed = 7") && resolved.contains("steps = 200"), "{resolved}");
    assert!(read(a.join("train_summary.json")).contains("\"steps\": 200"));
}

#[test]
fn evaluate_single_strategy() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let run = dir.path().join("run");
    ok(&["train", "--config", &cfg, "--steps", "30", "--seed", "1", "--out", run.to_str().unwrap()]);
    let ckpt = run.join("checkpoint_final.json");
    let ev = dir.path().join("eval");
    ok(&["evaluate", "--checkpoint", ckpt.to_str().unwrap(), "--strategy", "3", "--episodes", "4", "--out", ev.to_str().unwrap()]);
    let csv = read(ev.join("evaluation.csv"));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2, "{csv}");
    assert!(lines[0].starts_with("strategy,sp,es,yy,episodes,wins,losses,ties,win_pct,loss_pct,tie_pct"));
    let cells: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(&cells[..5], &["3", "false", "true", "false", "4"]);
    let counts: usize = cells[5..8].iter().map(|c| c.parse::<usize>().unwrap()).sum();
    assert_eq!(counts, 4);
    let pct: f64 = cells[8..].iter().map(|c| c.parse::<f64>().unwrap()).sum();
    assert!((pct - 100.0).abs() < 1e-9);
    let json: serde_json::Value = serde_json::from_str(&read(ev.join("evaluation.json"))).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 1);
}

#[test]
fn evaluate_without_a_readable_checkpoint_fails() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let out = dogfight(&["evaluate", "--checkpoint", missing.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("checkpoint") && err.contains("missing.json"), "{err}");
}

#[test]
fn duel_case2_starts_from_the_printed_conditions() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("duel");
    ok(&["duel", "--blue", "dt:8", "--red", "dt:8", "--scenario", "case2", "--out", out.to_str().unwrap()]);
    let traj = read(out.join("trajectory.csv"));
    let mut lines = traj.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let first: Vec<Vec<&str>> = lines.by_ref().take(2).map(|l| l.split(',').collect()).collect();
    for row in &first {
        assert_eq!(row[col("t")], "0.0");
        let mach: f64 = row[col("mach")].parse().unwrap();
        assert!((mach - 0.8).abs() < 1e-9, "{mach}");
        assert_eq!(row[col("p3")].parse::<f64>().unwrap(), -5000.0);
    }
    let summary: serde_json::Value = serde_json::from_str(&read(out.join("summary.json"))).unwrap();
    assert!(["win", "loss", "tie"].contains(&summary["outcome"].as_str().unwrap()));
    assert!(out.join("config.toml").exists());
}

#[test]
fn invalid_scenario_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dogfight(&["duel", "--scenario", "case3", "--out", dir.path().to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("scenario") && err.contains("case3"), "{err}");
}

#[test]
fn bad_agent_specs_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    for args in [
        vec!["duel", "--red", "dt:9", "--out", d],
        vec!["duel", "--blue", "dt:x", "--out", d],
        vec!["evaluate", "--blue", "dt:1", "--strategy", "0", "--out", d],
        vec!["export", "--out", d],
    ] {
        let out = dogfight(&args);
        assert!(!out.status.success(), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));
    }
}

#[test]
fn export_writes_one_trajectory_per_episode() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ex");
    ok(&["export", "--blue", "dt:2", "--strategy", "5", "--episodes", "2", "--seed", "3", "--out", out.to_str().unwrap()]);
    for i in 0..2 {
        assert!(read(out.join(format!("trajectories/episode_{i:04}.csv"))).starts_with("t,side,"));
    }
    let index: serde_json::Value = serde_json::from_str(&read(out.join("episodes.json"))).unwrap();
    assert_eq!(index.as_array().unwrap().len(), 2);
}
