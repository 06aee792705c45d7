use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn hri(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hri"))
        .args(args)
        .env_remove("HRI_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn script() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/circle_then_go_back.txt")
}

/// Tiny network; enough to exercise the file formats.
fn small_weights(dir: &Path, name: &str, seed: Option<&str>) -> PathBuf {
    let out = dir.join(name);
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hri"));
    cmd.args(["train", "--out", out.to_str().unwrap(), "--per-class", "2", "--epochs", "2", "--hidden", "4"]);
    cmd.env_remove("HRI_SEED");
    if let Some(s) = seed {
        cmd.env("HRI_SEED", s);
    }
    let o = cmd.output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn no_arguments_prints_usage_and_exits_2() {
    let o = hri(&[]);
    assert_eq!(o.status.code(), Some(2));
    let text = format!("{}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    assert!(text.contains("Usage"));
    for sub in ["train", "eval", "run-scenario", "grad-check", "serve"] {
        assert!(text.contains(sub), "{sub}");
    }
}

#[test]
fn unknown_flag_exits_2() {
    assert_eq!(hri(&["grad-check", "--bogus"]).status.code(), Some(2));
    assert_eq!(hri(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(hri(&["train"]).status.code(), Some(2), "missing --out");
}

#[test]
fn grad_check_passes_and_reports() {
    let o = hri(&["grad-check"]);
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o);
    let value: f64 = line.split_whitespace().nth(3).unwrap().parse().unwrap();
    assert!(value < 1e-4, "{line}");
}

#[test]
fn runtime_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("none.json");
    let o = hri(&["eval", "--weights", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"arch\": [45").unwrap();
    assert_eq!(hri(&["eval", "--weights", bad.to_str().unwrap()]).status.code(), Some(1));

    let w = small_weights(dir.path(), "w.json", None);
    let o = hri(&["run-scenario", "--script", "/nonexistent/script.txt", "--weights", w.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn train_then_eval_prints_a_confusion_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let w = small_weights(dir.path(), "w.json", None);
    let o = hri(&["eval", "--weights", w.to_str().unwrap(), "--per-class", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("accuracy "), "{text}");
    assert!(text.contains("(16 samples)"));
    assert!(text.contains("wave_arms_around"));
}

#[test]
fn seed_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let a = std::fs::read(small_weights(dir.path(), "a.json", Some("5"))).unwrap();
    let b = std::fs::read(small_weights(dir.path(), "b.json", Some("5"))).unwrap();
    let c = std::fs::read(small_weights(dir.path(), "c.json", Some("6"))).unwrap();
    let d = std::fs::read(small_weights(dir.path(), "d.json", None)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_ne!(a, d);
}

#[test]
fn run_scenario_writes_a_log_or_prints_it() {
    let dir = tempfile::tempdir().unwrap();
    let w = small_weights(dir.path(), "w.json", None);
    let log = dir.path().join("log.jsonl");
    let o = hri(&["run-scenario", "--script", script().to_str().unwrap(), "--weights", w.to_str().unwrap(), "--log", log.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let written = std::fs::read_to_string(&log).unwrap();
    assert!(written.starts_with("{\"time\":0.0,\"kind\":\"ScenarioStarted\""));
    assert!(stdout(&o).contains("RecordingCompleted"));

    let o = hri(&["run-scenario", "--script", script().to_str().unwrap(), "--weights", w.to_str().unwrap()]);
    assert_eq!(stdout(&o), written);
}

#[test]
fn priority_file_is_loaded_and_validated() {
    let dir = tempfile::tempdir().unwrap();
    let w = small_weights(dir.path(), "w.json", None);
    let cfg = dir.path().join("prio.conf");
    std::fs::write(&cfg, "# everything equal\ncircling = 5\n").unwrap();
    let o = hri(&["run-scenario", "--script", script().to_str().unwrap(), "--weights", w.to_str().unwrap(), "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    std::fs::write(&cfg, "circling = fast\n").unwrap();
    let o = hri(&["run-scenario", "--script", script().to_str().unwrap(), "--weights", w.to_str().unwrap(), "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
}

#[test]
fn serve_rejects_a_busy_port() {
    let dir = tempfile::tempdir().unwrap();
    let w = small_weights(dir.path(), "w.json", None);
    let taken = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let port = taken.local_addr().unwrap().port().to_string();
    let o = hri(&["serve", "--weights", w.to_str().unwrap(), "--port", &port]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("binding"));
}
