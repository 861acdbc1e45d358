use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

fn sphiso(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sphiso")).args(args).output().expect("binary runs")
}

fn write_smoke(dir: &Path) -> String {
    let path = dir.join("smoke.json");
    fs::write(
        &path,
        r#"{"name": "smoke", "seed": 7, "suite": "circle", "circle": {"trials": 10, "max_degree": 3}}"#,
    )
    .unwrap();
    path.to_string_lossy().into_owned()
}

fn run_dirs(out: &Path) -> Vec<std::path::PathBuf> {
    let mut v: Vec<_> = fs::read_dir(out).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

#[test]
fn smoke_runs_pass_and_repeat_byte_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = write_smoke(tmp.path());
    let out = tmp.path().join("runs");
    let out_s = out.to_string_lossy().into_owned();

    let t = Instant::now();
    let first = sphiso(&["run", &scenario, "--out", &out_s]);
    let secs = t.elapsed().as_secs_f64();
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    assert!(secs < 2.0, "smoke took {secs} s");
    let second = sphiso(&["run", &scenario, "--out", &out_s]);
    assert_eq!(second.status.code(), Some(0));

    let dirs = run_dirs(&out);
    assert_eq!(dirs.len(), 2);
    for d in &dirs {
        assert!(d.file_name().unwrap().to_string_lossy().starts_with("smoke-"));
        for f in ["report.json", "manifest.json", "cross_section.csv"] {
            assert!(d.join(f).exists(), "{f} missing in {}", d.display());
        }
    }
    let a = fs::read(dirs[0].join("report.json")).unwrap();
    let b = fs::read(dirs[1].join("report.json")).unwrap();
    assert_eq!(a, b);

    let report: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(report["passed"], true);
    for r in report["records"].as_array().unwrap() {
        assert!(!r["tag"].as_str().unwrap().is_empty());
        assert_eq!(r["inputs_digest"].as_str().unwrap().len(), 64);
    }
}

#[test]
fn seed_and_suite_flags_override_the_file() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = write_smoke(tmp.path());
    let out = tmp.path().join("runs");
    let o = sphiso(&["run", &scenario, "--seed", "99", "--suite", "polydisc", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let dir = &run_dirs(&out)[0];
    let report: serde_json::Value = serde_json::from_slice(&fs::read(dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["scenario"]["seed"], 99);
    let ids: Vec<&str> = report["records"].as_array().unwrap().iter().map(|r| r["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["gamma_equation", "scaled_isometry", "scaling_equivalence"]);
}

#[test]
fn usage_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.json");
    fs::write(&bad, r#"{"name": "t", "tolerances": {"exact": 0}}"#).unwrap();
    let o = sphiso(&["run", bad.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("tolerances"));

    let scenario = write_smoke(tmp.path());
    assert_eq!(sphiso(&["run", &scenario, "--suite", "torus"]).status.code(), Some(2));
    assert_eq!(sphiso(&["run", "/nonexistent/x.json"]).status.code(), Some(2));
    assert_eq!(sphiso(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(sphiso(&["symbol-eval", "z +", "--grid", "8"]).status.code(), Some(2));
}

#[test]
fn failing_checks_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("strict.json");
    // a cross-section gap of 1e-9 is out of reach at N = 64
    fs::write(
        &path,
        r#"{"name": "strict", "suite": "circle", "circle": {"trials": 2, "max_degree": 2, "max_truncation": 64},
            "tolerances": {"bracket": 1e-9}}"#,
    )
    .unwrap();
    let o = sphiso(&["run", path.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cross_section"));
}

#[test]
fn explain_cites_tags() {
    for (id, cite) in [
        ("thm2_1_identities", "Theorem 2.1"),
        ("hartman_wintner", "Theorem 3.1 (3)"),
        ("gamma_equation", "Example 4.3"),
    ] {
        let o = sphiso(&["explain", id]);
        assert_eq!(o.status.code(), Some(0));
        assert!(String::from_utf8_lossy(&o.stdout).contains(cite));
    }
    let o = sphiso(&["explain", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("hartman_wintner"));
}

#[test]
fn symbol_eval_reports_bounds() {
    let o = sphiso(&["symbol-eval", "2*z^2 - zbar", "--grid", "4096"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let b = v["sup_norm_bracket"].as_array().unwrap();
    assert!((b[0].as_f64().unwrap() - 3.0).abs() < 1e-12);
    assert_eq!(b[1].as_f64().unwrap(), 3.0);
    assert_eq!(v["winding_about_zero"], 2);
}
