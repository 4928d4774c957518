//! The `nlheat` binary, driven as a user would.

use std::path::{Path, PathBuf};
use std::process::Command;

fn nlheat() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nlheat"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> i32 {
    let out = nlheat().args(args).output().unwrap();
    out.status.code().unwrap()
}

#[test]
fn simulate_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "sim.json",
        r#"{"symbols": [{"kind": "stable", "alpha": 0.5}, {"kind": "identity"}],
            "bullet": {"phi": {"kind": "stable", "alpha": 0.5}}}"#,
    );
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for (dir, threads) in [(&a, "1"), (&b, "2")] {
        let code = run(&[
            "--threads",
            threads,
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "7",
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
    }
    for name in ["subordinator_0_0.csv", "inverse_0_0.csv", "bullet.csv", "manifest.json", "report.json"] {
        assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap(), "{name}");
    }
    let text = std::fs::read_to_string(a.join("subordinator_1_0.csv")).unwrap();
    for line in text.lines().skip(1) {
        let (t, v) = line.split_once(',').unwrap();
        assert!((t.parse::<f64>().unwrap() - v.parse::<f64>().unwrap()).abs() < 1e-12);
    }
}

#[test]
fn seed_is_mandatory_and_keys_are_checked() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "sim.json", "{}");
    let out = tmp.path().join("o");
    assert_eq!(run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]), 2);
    let bad = write(tmp.path(), "bad.json", "{\n  \"seed\": 1,\n  \"horizn\": 2\n}");
    let o = nlheat()
        .args(["simulate", "--config", bad.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains(":3:") && err.contains("horizn"), "{err}");
}

#[test]
fn estimate_matches_the_bundled_oracle_table() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "est.json",
        r#"{"problem": {"phi": {"kind": "stable", "alpha": 0.5}, "datum": {"name": "exp-decay"}},
            "points": {"times": [0.25, 0.5, 1.0], "xs": [0.0, 0.5, 1.0]},
            "seed": 3, "mc": {"paths": 4000}}"#,
    );
    let out = tmp.path().join("est");
    assert_eq!(run(&["estimate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]), 0);
    let table = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/benchmark_oracle.csv");
    let report = tmp.path().join("cmp");
    assert_eq!(
        run(&["compare", out.to_str().unwrap(), table.to_str().unwrap(), "--out", report.to_str().unwrap()]),
        0
    );
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(report.join("compare.json")).unwrap()).unwrap();
    assert_eq!(json["pass"], true);
    assert_eq!(json["points_exceeding"], 0);
}

#[test]
fn compare_controls() {
    let tmp = tempfile::tempdir().unwrap();
    let good = tmp.path().join("good");
    let bad = tmp.path().join("bad");
    let c = configs();
    assert_eq!(
        run(&["oracle", "--config", c.join("benchmark_oracle.json").to_str().unwrap(), "--out", good.to_str().unwrap()]),
        0
    );
    assert_eq!(
        run(&["oracle", "--config", c.join("mismatched_oracle.json").to_str().unwrap(), "--out", bad.to_str().unwrap()]),
        0
    );
    assert_eq!(run(&["compare", good.to_str().unwrap(), good.to_str().unwrap()]), 0);
    assert_eq!(run(&["compare", good.to_str().unwrap(), bad.to_str().unwrap()]), 4);
    assert_eq!(run(&["compare", bad.to_str().unwrap(), good.to_str().unwrap()]), 4);
    let short = write(tmp.path(), "short.csv", "t,x,value\n0.25,0.0,0.3\n");
    assert_eq!(run(&["compare", good.to_str().unwrap(), short.to_str().unwrap()]), 2);
}

#[test]
fn estimate_reports_the_boundary_class() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "dyn.json",
        r#"{"problem": {"phi": {"kind": "stable", "alpha": 0.5}, "psi": {"kind": "gamma", "a": 1, "b": 2},
                        "eta": 1, "datum": {"name": "constant"}},
            "points": {"times": [0.5], "xs": [0.0]}, "seed": 1, "mc": {"paths": 10}}"#,
    );
    let out = tmp.path().join("o");
    assert_eq!(run(&["estimate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]), 0);
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["problem"]["boundary_class"], "Delayed");
    let values = std::fs::read_to_string(out.join("values.csv")).unwrap();
    assert_eq!(values, "t,x,value,se\n0.5,0.0,1.0,0.0\n");
}

#[test]
fn solve_writes_field_exports() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let cfg = configs().join("benchmark_solve.json");
    assert_eq!(run(&["solve", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]), 0);
    for name in ["values.csv", "field.csv", "field.bin", "field.bin.json", "manifest.json", "report.json"] {
        assert!(out.join(name).exists(), "{name}");
    }
}
