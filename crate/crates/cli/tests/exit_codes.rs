use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skewsharp")).args(args).env_remove("SKEWSHARP_TOL").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_q1_saturates_eq3() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = run(&[
        "check",
        path(&fixture("q1_state.json")),
        path(&fixture("q1_observables.json")),
        "--two-obs",
        "--f",
        "sld",
        "--json-out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["margins"]["eq3"]["verdict"], "saturated");
    assert_eq!(report["margins"]["rs"]["verdict"], "holds");
    assert_eq!(report["inputs"]["state_sha256"].as_str().unwrap().len(), 64);
    for key in ["eq9a", "eq9b", "eq10", "furuichi", "eq18[sld]", "eq19[sld]", "wy-strongest[sld]"] {
        assert!(report["margins"].get(key).is_some(), "{key}");
    }
}

#[test]
fn check_rejects_bad_inputs() {
    let obs = fixture("q1_observables.json");
    let o = run(&["check", path(&fixture("bad_trace_state.json")), path(&obs)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("trace"), "{}", stderr(&o));

    let o = run(&["check", path(&fixture("q1_state.json")), path(&obs), "--f", "wyd:0.7"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("0.7"));

    let o = run(&["check", path(&fixture("q1_state.json")), path(&fixture("non_hermitian_observables.json"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Hermitian"));

    let o = run(&["check", path(&fixture("fock1_c24.json")), path(&obs)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("dimension"));

    let o = run(&["check", path(&fixture("q1_state.json")), path(&obs), "--f", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn rounding_below_tolerance_is_reported_as_violation() {
    let o = run(&[
        "check",
        path(&fixture("q1_state.json")),
        path(&fixture("q1_observables.json")),
        "--two-obs",
        "--tol",
        "1e-30",
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("VIOLATED"));
}

#[test]
fn tolerance_env_override_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_skewsharp"))
        .args(["check", path(&fixture("q1_state.json")), path(&fixture("q1_observables.json"))])
        .env("SKEWSHARP_TOL", "abc")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_skewsharp"))
        .args(["check", path(&fixture("q1_state.json")), path(&fixture("q1_observables.json"))])
        .env("SKEWSHARP_TOL", "1e-6")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}

fn lambda_of(label: &str) -> f64 {
    let o = run(&["lambda", "--f", label]);
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o);
    let v = line.split_whitespace().find_map(|t| t.strip_prefix("lambda=")).unwrap();
    assert!(line.contains("lower=") && line.contains("upper=") && line.contains("conjecture_match="));
    v.parse().unwrap()
}

#[test]
fn lambda_values() {
    assert!((lambda_of("sld") - 0.5).abs() < 1e-9);
    assert!((lambda_of("wy") - 1.0).abs() < 1e-9);
    assert!((lambda_of("wyd:0.3") - 1.0).abs() < 1e-9);
    assert_eq!(run(&["lambda", "--f", "unknown"]).status.code(), Some(2));
}

#[test]
fn lambda_grid_dump() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("grid.csv");
    let o = run(&["lambda", "--f", "sld", "--grid-dump", csv.to_str().unwrap(), "--grid-points", "11"]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 12);
    assert!(text.starts_with("x,F"));
}

#[test]
fn gaussian_examples() {
    let o = run(&["gaussian", "--modes", "1", "--omega", "1", "--beta", "1.3863", "--cutoff", "60"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run(&["gaussian", "--modes", "1", "--beta", "1e9"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(run(&["gaussian", "--cutoff", "4"]).status.code(), Some(2));
    assert_eq!(run(&["gaussian", "--modes", "1", "--omega", "1", "--xi", "2"]).status.code(), Some(2));
}

#[test]
fn gaussian_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.json");
    let o = run(&[
        "gaussian", "--modes", "1", "--omega", "1", "--xi", "0.3+0.2i", "--beta", "2", "--cutoff", "60", "--json-out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(v["exact"]["delta_g"].as_f64().unwrap().abs() < 1e-10);
    assert!(v["numeric"]["delta_g"].as_f64().unwrap().abs() < 1e-6);
    assert!(v["tail_mass"].as_f64().is_some());
}

fn nongauss(name: &str, cutoff: &str) -> (Option<i32>, String) {
    let o = run(&["nongauss", path(&fixture(name)), "--cutoff", cutoff]);
    (o.status.code(), stdout(&o).trim().to_string())
}

#[test]
fn nongauss_fixtures() {
    let (code, out) = nongauss("fock1_c24.json", "24");
    assert_eq!(code, Some(0));
    assert_eq!(out, "5.000000000000");
    let (code, out) = nongauss("thermal_q025_c60.json", "60");
    assert_eq!(code, Some(0));
    assert!(out.parse::<f64>().unwrap().abs() < 1e-8);
    let (code, out) = nongauss("vacuum_c24.json", "24");
    assert_eq!(code, Some(0));
    assert_eq!(out.parse::<f64>().unwrap(), 0.0);
    assert_eq!(nongauss("fock1_c24.json", "30").0, Some(2));
}

#[test]
fn fuzz_is_deterministic_and_clean() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let oa = run(&["fuzz", "--seed", "42", "--trials", "200", "--json-out", a.to_str().unwrap()]);
    let ob = run(&["fuzz", "--seed", "42", "--trials", "200", "--threads", "1", "--json-out", b.to_str().unwrap()]);
    assert_eq!(oa.status.code(), Some(0), "{}", stdout(&oa));
    assert_eq!(ob.status.code(), Some(0));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn fuzz_rejects_bad_flags() {
    assert_eq!(run(&["fuzz", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(run(&["fuzz", "--dims", "1"]).status.code(), Some(2));
    assert_eq!(run(&["fuzz", "--ranks", "half"]).status.code(), Some(2));
    assert_eq!(run(&["fuzz", "--relations", "eq99"]).status.code(), Some(2));
    assert_eq!(run(&["fuzz", "--bogus"]).status.code(), Some(2));
}

#[test]
fn reproducer_replays_through_check() {
    let dir = tempfile::tempdir().unwrap();
    let state: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("q1_state.json")).unwrap()).unwrap();
    let obs: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("q1_observables.json")).unwrap()).unwrap();
    let rep = serde_json::json!({
        "dim": 2,
        "matrix": state["matrix"],
        "observables": obs["observables"],
        "relation": "eq3",
        "seed": 0,
        "trial": 0,
    });
    let file = dir.path().join("rep.json");
    std::fs::write(&file, rep.to_string()).unwrap();
    let o = run(&["check", file.to_str().unwrap(), file.to_str().unwrap(), "--relations", "eq3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("saturated"));
}

#[test]
fn strength_study_runs() {
    let o = run(&["strength", "--trials", "50"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("provable ordering failures=0"));
}
