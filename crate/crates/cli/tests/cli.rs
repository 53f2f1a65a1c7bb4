use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const SMALL: &str = "\
run.id = small
grid.w0 = 0
grid.w1 = 8
grid.v0 = 6
grid.v1 = 14
grid.delta = 0.25
data.amplitude = 0.2
data.center = 9
data.width = 2
data.charge = 0.1
potential.kind = quartic
potential.c = 1
curves = r:4
";

const MODE: &str = "\
sector = mode
mode.l = 1
potential.kind = none
grid.w1 = 10
grid.v1 = 20
grid.delta = 0.25
curves = r:4
";

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mhdecay")).args(args).output().unwrap()
}

fn write_cfg(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.cfg");
    fs::write(&p, text).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn run_ok(cmd: &str, text: &str, extra: &[&str]) -> (tempfile::TempDir, String) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), text);
    let out = dir.path().join("out");
    let mut args = vec![cmd, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = bin(&args);
    assert_eq!(o.status.code(), Some(0), "{}\n{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    (dir, stdout(&o))
}

#[test]
fn evolve_writes_history() {
    let (dir, out) = run_ok("evolve", SMALL, &[]);
    assert!(out.contains("nonlinear history 33x33"), "{out}");
    let text = fs::read_to_string(dir.path().join("out/history.csv")).unwrap();
    assert!(text.lines().next().unwrap().contains("mhdecay-history"));
    assert_eq!(text.lines().count(), 2 + 33 * 33);
}

#[test]
fn modes_writes_mode_history() {
    let (dir, out) = run_ok("modes", MODE, &[]);
    assert!(out.contains("mode history"), "{out}");
    assert!(dir.path().join("out/history.csv").exists());
}

#[test]
fn sector_mismatch_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), MODE);
    let o = bin(&["evolve", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("modes"));
}

#[test]
fn bad_config_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "grid.delta = 0.5\ngrid.delta = 0.25\n");
    let o = bin(&["diagnose", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let o = bin(&["diagnose", "--config", dir.path().join("missing.cfg").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn diagnose_reports_invariants() {
    let (dir, out) = run_ok("diagnose", SMALL, &[]);
    assert!(out.contains("PASS") && !out.contains("FAIL"), "{out}");
    for f in ["history.csv", "diagnostics.ndjson"] {
        assert!(dir.path().join("out").join(f).exists(), "{f}");
    }
}

#[test]
fn fit_reports_exponents() {
    let (dir, out) = run_ok("fit", MODE, &[]);
    assert!(out.contains("p = "), "{out}");
    let text = fs::read_to_string(dir.path().join("out/fits.ndjson")).unwrap();
    for line in text.lines() {
        serde_json::from_str::<serde_json::Value>(line).unwrap();
    }
}

#[test]
fn convergence_prints_orders() {
    let (dir, out) = run_ok("convergence", MODE, &["--levels", "2"]);
    assert!(out.contains("deltas [0.25, 0.125]"), "{out}");
    assert!(out.contains("|psi|(probe)"));
    assert!(dir.path().join("out/convergence.ndjson").exists());
}

#[test]
fn verify_without_evolution_is_not_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["verify", "--suite", "no-evolution", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("SKIP")).count(), 10, "{out}");
    assert!(out.lines().any(|l| l.starts_with("PASS C5")));
    assert!(dir.path().join("acceptance.ndjson").exists());
    let o = bin(&["verify", "--suite", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}
