use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use vardecomp::eval::PhantomSpec;
use vardecomp::image::{read_raw, write_pgm};
use vardecomp::Image;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vardecomp"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("{e}: stdout {:?} stderr {:?}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
    })
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// A 64x64 phantom: one block, one texture patch, noise of `sigma`.
fn small_spec(dir: &Path, sigma: f64) -> PathBuf {
    let spec = serde_json::json!({
        "width": 64, "height": 64, "background": 128.0,
        "shapes": [{"kind": "rect", "region": {"row0": 8, "col0": 8, "width": 24, "height": 20}, "value": 60.0}],
        "textures": [{"region": {"row0": 36, "col0": 4, "width": 56, "height": 24},
                      "amplitude": 30.0, "omega": 0.8, "theta_deg": 0.0}],
        "noise": {"sigma": sigma, "seed": 7}
    });
    let path = dir.join(format!("spec_{sigma}.json"));
    std::fs::write(&path, spec.to_string()).unwrap();
    path
}

fn synth(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["synth", "--out", p(dir)];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn synth_is_deterministic() {
    let t = tempfile::tempdir().unwrap();
    let spec = small_spec(t.path(), 20.0);
    let (a, b) = (t.path().join("a"), t.path().join("b"));
    assert_eq!(code(&synth(&a, &["--spec", p(&spec)])), 0);
    assert_eq!(code(&synth(&b, &["--spec", p(&spec)])), 0);
    for name in ["u0", "v0", "w0", "f0"] {
        let file = format!("{name}.rawf");
        assert_eq!(std::fs::read(a.join(&file)).unwrap(), std::fs::read(b.join(&file)).unwrap(), "{name}");
        assert!(a.join(format!("{name}.pgm")).exists());
    }
    let back: PhantomSpec = serde_json::from_str(&std::fs::read_to_string(a.join("phantom.json")).unwrap()).unwrap();
    assert_eq!(back.width, 64);
}

#[test]
fn synth_sigma_and_seed_overrides() {
    let t = tempfile::tempdir().unwrap();
    let spec = small_spec(t.path(), 20.0);
    let (a, b, c) = (t.path().join("a"), t.path().join("b"), t.path().join("c"));
    synth(&a, &["--spec", p(&spec)]);
    synth(&b, &["--spec", p(&spec), "--seed", "8"]);
    synth(&c, &["--spec", p(&spec), "--sigma", "0"]);
    let f = |d: &Path, n: &str| read_raw(d.join(format!("{n}.rawf"))).unwrap();
    assert_ne!(f(&a, "w0"), f(&b, "w0"));
    assert_eq!(f(&a, "u0"), f(&b, "u0"));
    assert_eq!(f(&c, "w0").max_abs(), 0.0);
    assert_eq!(f(&c, "f0"), f(&c, "u0").add(&f(&c, "v0")).unwrap());
}

#[test]
fn rof_on_constant_pgm() {
    let t = tempfile::tempdir().unwrap();
    let input = t.path().join("flat.pgm");
    write_pgm(&Image::filled(32, 24, 77.0), &input).unwrap();
    let out = t.path().join("out");
    let o = run(&["decompose", "-i", p(&input), "-o", p(&out), "--model", "rof", "--lambda", "10"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert_eq!(r["model"], "rof");
    assert_eq!(r["width"], 32);
    let u = read_raw(out.join("u.rawf")).unwrap();
    assert!(u.max_abs_diff(&Image::filled(32, 24, 77.0)).unwrap() < 1e-9);
    assert_eq!(read_raw(out.join("v.rawf")).unwrap().max_abs(), 0.0);
    assert!(!out.join("w.rawf").exists());
    assert!(out.join("report.json").exists());
}

#[test]
fn contourlet_preset_runs() {
    let t = tempfile::tempdir().unwrap();
    let refd = t.path().join("ref");
    synth(&refd, &["--spec", p(&small_spec(t.path(), 20.0))]);
    let out = t.path().join("co");
    let o = run(&["decompose", "-i", p(&refd.join("f0.rawf")), "-o", p(&out), "--paper-preset", "co"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert_eq!(r["model"], "bv-g-co");
    assert_eq!(r["preset"], "Co");
    assert_eq!(r["params"]["delta"], 23.5);
    assert_eq!(r["converged"], true);
    for part in ["u", "v", "w"] {
        assert!(out.join(format!("{part}.rawf")).exists());
    }
}

#[test]
fn validation_errors_exit_1() {
    let t = tempfile::tempdir().unwrap();
    let refd = t.path().join("ref");
    synth(&refd, &["--spec", p(&small_spec(t.path(), 20.0))]);
    let f0 = refd.join("f0.rawf");
    let out = t.path().join("out");
    let missing = run(&[
        "decompose", "-i", p(&f0), "-o", p(&out), "-m", "bv-g-g", "--lambda", "10", "--mu1", "1000", "--window", "3",
    ]);
    assert_eq!(code(&missing), 1);
    assert!(String::from_utf8_lossy(&missing.stderr).contains("mu2"));
    assert!(!out.join("report.json").exists());
    assert_eq!(code(&run(&["decompose", "-i", p(&f0), "-o", p(&out), "-m", "bv-x", "--lambda", "1"])), 1);
    assert_eq!(code(&run(&["decompose", "-i", p(&f0), "-o", p(&out), "-m", "rof", "--lambda", "-1"])), 1);
    assert_eq!(code(&run(&["decompose", "--bogus"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn io_errors_exit_2() {
    let t = tempfile::tempdir().unwrap();
    let bad = t.path().join("bad.rawf");
    std::fs::write(&bad, b"not an image").unwrap();
    let out = t.path().join("out");
    assert_eq!(code(&run(&["decompose", "-i", p(&bad), "-o", p(&out), "-m", "rof", "--lambda", "1"])), 2);
    let nowhere = t.path().join("missing.pgm");
    assert_eq!(code(&run(&["decompose", "-i", p(&nowhere), "-o", p(&out), "-m", "rof", "--lambda", "1"])), 2);
}

#[test]
fn iteration_cap_exits_3() {
    let t = tempfile::tempdir().unwrap();
    let refd = t.path().join("ref");
    synth(&refd, &["--spec", p(&small_spec(t.path(), 20.0))]);
    let out = t.path().join("out");
    let o = run(&[
        "decompose", "-i", p(&refd.join("f0.rawf")), "-o", p(&out), "--paper-preset", "ac2", "--n-step", "2",
        "--epsilon", "1e-9",
    ]);
    assert_eq!(code(&o), 3);
    assert_eq!(json(&o)["converged"], false);
    assert!(out.join("u.rawf").exists());
}

#[test]
fn self_evaluation_is_zero() {
    let t = tempfile::tempdir().unwrap();
    let refd = t.path().join("ref");
    synth(&refd, &["--spec", p(&small_spec(t.path(), 20.0))]);
    let f = |n: &str| refd.join(format!("{n}.rawf"));
    let o = run(&[
        "eval", "-r", p(&refd), "--u", p(&f("u0")), "--v", p(&f("v0")), "--w", p(&f("w0")),
    ]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["err_u"], 0.0);
    assert_eq!(r["err_v"], 0.0);
    assert_eq!(r["residue"], 0.0);
    assert_eq!(r["model"], Value::Null);
}

fn keys(v: &Value) -> BTreeSet<String> {
    v.as_object().unwrap().keys().cloned().collect()
}

#[test]
fn preset_reports_share_schema() {
    let t = tempfile::tempdir().unwrap();
    let refd = t.path().join("ref");
    synth(&refd, &["--spec", p(&small_spec(t.path(), 20.0))]);
    let mut reports = Vec::new();
    for preset in ["JG", "AC2", "Co"] {
        let o = run(&["eval", "-r", p(&refd), "--paper-preset", preset]);
        assert!(matches!(code(&o), 0 | 3), "{preset}");
        reports.push(json(&o));
    }
    let k0 = keys(&reports[0]);
    for r in &reports {
        assert_eq!(keys(r), k0);
        assert_eq!(r["schema_version"], 1);
        assert_eq!(r["command"], "eval");
        assert!(r["residue"].as_f64().unwrap() > 0.0);
        assert!(r["err_v"].as_f64().unwrap().is_finite());
    }
    let models: Vec<&str> = reports.iter().map(|r| r["model"].as_str().unwrap()).collect();
    assert_eq!(models, ["bv-g-g", "bv-g-e", "bv-g-co"]);
}

#[test]
fn components_eval_reads_decompose_output() {
    let t = tempfile::tempdir().unwrap();
    let refd = t.path().join("ref");
    synth(&refd, &["--spec", p(&small_spec(t.path(), 20.0))]);
    let out = t.path().join("dec");
    let d = run(&["decompose", "-i", p(&refd.join("f0.rawf")), "-o", p(&out), "--paper-preset", "ac2"]);
    assert_eq!(code(&d), 0);
    let direct = json(&run(&["eval", "-r", p(&refd), "--paper-preset", "ac2"]));
    let from_files = json(&run(&["eval", "-r", p(&refd), "--components", p(&out)]));
    assert_eq!(from_files["model"], "bv-g-e");
    for k in ["err_u", "err_v", "residue", "iterations"] {
        assert_eq!(from_files[k], direct[k], "{k}");
    }
}

#[test]
fn sweep_writes_ten_rows() {
    let t = tempfile::tempdir().unwrap();
    let refd = t.path().join("ref");
    synth(&refd, &["--spec", p(&small_spec(t.path(), 20.0))]);
    let csv = t.path().join("sweep.csv");
    let o = run(&["eval", "-r", p(&refd), "--sweep", "--jobs", "2", "--csv", p(&csv)]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    let rows = r["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 10);
    assert_eq!(r["command"], "eval-sweep");
    assert!(r["fit"]["r2"].as_f64().unwrap() > 0.99);
    let ratio = rows[2]["metric"].as_f64().unwrap() / rows[1]["metric"].as_f64().unwrap();
    assert!((ratio - 4.0).abs() < 0.6, "{ratio}");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 11);
    let single = json(&run(&["eval", "-r", p(&refd), "--sweep"]));
    assert_eq!(single["rows"], r["rows"]);
}
