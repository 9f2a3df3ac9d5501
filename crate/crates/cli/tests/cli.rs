use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_toa-lab"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out").arg(out).output().unwrap()
}

fn result(path: &Path) -> Value {
    let v: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    v["result"].clone()
}

#[test]
fn verify_ordering_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", "--suite", "ordering"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 2, "{text}");
    assert_eq!(result(&dir.path().join("verify.json")).as_array().unwrap().len(), 2);
}

#[test]
fn distribution_reproduces_opaque_shift() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("opaque_barrier.json");
    let o = run(
        &["distribution", "--config", cfg.to_str().unwrap(), "--grid", "300"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = result(&dir.path().join("distribution_summary.json"));
    let shift = r["peak_shift"].as_f64().unwrap();
    assert!((shift + 1.0 / 30.0).abs() < 0.1 / 30.0, "{shift}");
    let csv = fs::read_to_string(dir.path().join("distribution.csv")).unwrap();
    assert!(csv.starts_with("# toa-lab "));
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 301);
}

#[test]
fn below_barrier_traversal_is_instantaneous() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("below_barrier.json");
    let o = run(&["tunnel-time", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(o.status.success());
    let r = result(&dir.path().join("tunnel_time.json"));
    assert!(r["tau_trav"].as_f64().unwrap() < 1e-20);
    assert_eq!(r["support"], "below_barrier");
    assert_eq!(r["routes"].as_array().unwrap().len(), 3);
}

#[test]
fn artifacts_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = configs().join("barrier_eigen.json");
    for d in [&a, &b] {
        assert!(
            run(&["eigen", "--config", cfg.to_str().unwrap(), "--grid", "9"], d.path())
                .status
                .success()
        );
    }
    for f in ["eigen_position.csv", "eigen_momentum.csv"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn deform_reports_oracle_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("harmonic_bj.json");
    assert!(run(&["deform", "--config", cfg.to_str().unwrap()], dir.path())
        .status
        .success());
    let r = result(&dir.path().join("deform_summary.json"));
    assert!(r["max_rel_error"].as_f64().unwrap() < 1e-8);
    assert_eq!(r["oracle"], "born_jordan");
}

#[test]
fn kernel_region_dump() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("low_barrier.json");
    let o = run(
        &[
            "kernel",
            "--config",
            cfg.to_str().unwrap(),
            "--region",
            "III",
            "--grid",
            "5",
        ],
        dir.path(),
    );
    assert!(o.status.success());
    let r = result(&dir.path().join("kernel_summary.json"));
    assert_eq!(r["region"], "III");
    assert_eq!(r["points"], 25);
}

#[test]
fn validation_failures_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"potential": {"type": "free"}, "colour": "blue"}"#).unwrap();
    let o = run(&["kernel", "--config", bad.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1));

    let harmonic = configs().join("harmonic_bj.json");
    let o = run(&["tunnel-time", "--config", harmonic.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1));

    let o = run(&["verify", "--suite", "everything"], dir.path());
    assert_eq!(o.status.code(), Some(1));

    let o = run(
        &["eigen", "--config", harmonic.to_str().unwrap(), "--epsilon", "-1"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));

    let o = bin().args(["tunnel-time", "--bogus"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn thread_variable_validated() {
    let o = bin()
        .env("TOA_LAB_THREADS", "zero")
        .args(["verify", "--suite", "ordering"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}
