use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn gyrofree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gyrofree"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn shipped(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn summary_value(text: &str, key: &str) -> f64 {
    let line = text.lines().find(|l| l.starts_with("t=")).expect("summary line");
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("{key} missing from `{line}`"))
        .parse()
        .unwrap()
}

#[test]
fn simulate_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = gyrofree(&[
        "simulate",
        "--config",
        shipped("paper.toml").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["trace.csv", "trace.svg", "measurements.csv"] {
        assert!(dir.path().join(name).is_file(), "{name} missing");
    }
    let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 60_002);
    let text = stdout(&out);
    assert_eq!(summary_value(&text, "t"), 60.0);
    assert!(summary_value(&text, "att_err_rad") < 0.1);
}

#[test]
fn replay_reproduces_noise_free_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("short.toml");
    std::fs::write(&cfg_path, "duration = 5.0\nseed = 3\nnoise_on = false\n").unwrap();
    let cfg = cfg_path.to_str().unwrap();
    let run_dir = dir.path().join("run");
    let first = gyrofree(&["simulate", "--config", cfg, "--out", run_dir.to_str().unwrap()]);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));

    let log = run_dir.join("measurements.csv");
    let replay_dir = dir.path().join("replay");
    let second = gyrofree(&[
        "replay",
        "--log",
        log.to_str().unwrap(),
        "--config",
        cfg,
        "--out",
        replay_dir.to_str().unwrap(),
    ]);
    assert!(second.status.success(), "{}", String::from_utf8_lossy(&second.stderr));
    assert!(replay_dir.join("replay_trace.csv").is_file());
    for key in ["att_err_rad", "omega_err"] {
        let (a, b) = (
            summary_value(&stdout(&first), key),
            summary_value(&stdout(&second), key),
        );
        assert!((a - b).abs() <= 1e-9, "{key}: {a} vs {b}");
    }
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("short.toml");
    std::fs::write(&cfg_path, "duration = 0.5\nseed = 3\n").unwrap();
    let cfg = cfg_path.to_str().unwrap();
    let run = |seed: &str, sub: &str| {
        let out_dir = dir.path().join(sub);
        let out = gyrofree(&[
            "simulate",
            "--config",
            cfg,
            "--seed",
            seed,
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        std::fs::read(out_dir.join("trace.csv")).unwrap()
    };
    assert_eq!(run("3", "a"), run("3", "b"));
    assert_ne!(run("3", "a"), run("4", "c"));
}

#[test]
fn check_passes() {
    let out = gyrofree(&["check", "--samples", "200"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 5);
    assert!(!text.contains("FAIL"));
}

#[test]
fn bad_input_fails() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "dt = -1.0\n").unwrap();
    let unknown = dir.path().join("unknown.toml");
    std::fs::write(&unknown, "gain = 2.0\n").unwrap();
    let missing_log = dir.path().join("missing.csv");

    for args in [
        vec!["simulate", "--config", bad.to_str().unwrap()],
        vec!["simulate", "--config", unknown.to_str().unwrap()],
        vec!["simulate", "--config", "/nonexistent/config.toml"],
        vec!["replay", "--log", missing_log.to_str().unwrap()],
        vec!["simulate"],
        vec!["frobnicate"],
    ] {
        let out = gyrofree(&args);
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(!out.stderr.is_empty());
    }
}
