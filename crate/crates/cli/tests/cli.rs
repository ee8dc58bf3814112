use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn liouville(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liouville"))
        .args(args)
        .env_remove("LIOUVILLE_SEED")
        .output()
        .expect("run liouville")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn export(dir: &Path, id: &str) -> PathBuf {
    let path = dir.join(format!("{}.toml", id.replace(['(', ')', ','], "_")));
    let o = liouville(&["catalog", "export", id, "-o", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    path
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

/// Parses the flow CSV into (header, rows).
fn csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn validate_accepts_exported_twisted_model() {
    let dir = TempDir::new().unwrap();
    let file = export(dir.path(), "tw_model(2,1)");
    let o = liouville(&["validate", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = json(&o);
    assert_eq!(report["passed"], true);
    assert_eq!(report["seed"], 42);
    assert_eq!(report["samples"], 1000);
    assert!(report["jacobi"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn validate_is_deterministic_per_seed() {
    let dir = TempDir::new().unwrap();
    let file = export(dir.path(), "oscillator_b");
    let f = file.to_str().unwrap();
    let a = liouville(&["validate", f, "--seed", "7"]);
    let b = liouville(&["validate", f, "--seed", "7"]);
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(json(&a)["seed"], 7);
    let env = Command::new(env!("CARGO_BIN_EXE_liouville"))
        .args(["validate", f])
        .env("LIOUVILLE_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(json(&env)["seed"], 11);
}

#[test]
fn validate_rejects_dependent_integrals() {
    let dir = TempDir::new().unwrap();
    let file = write(
        dir.path(),
        "dep.toml",
        r#"
[system]
name = "dependent"
coordinates = ["theta1:angle:a1", "theta2:angle:a2"]
structure = { kind = "twisted_b", c = 1.0, singular = "a1" }

[integrals]
f1 = "a1"
f2 = "a1"
"#,
    );
    let o = liouville(&["validate", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let report = json(&o);
    assert_eq!(report["passed"], false);
    assert_eq!(report["independence"]["off_z"].as_f64().unwrap(), 0.0);
}

#[test]
fn validate_rejects_non_poisson_matrix() {
    let dir = TempDir::new().unwrap();
    // {x, y} = 1, {x, z} = -x, {y, z} = -y: the dual vector (-y, x, 1) has v . curl v = 2, so Jacobi fails.
    let file = write(
        dir.path(),
        "jac.toml",
        r#"
[system]
name = "not_poisson"
coordinates = ["x:real:y"]
transverse = ["z"]
structure = { kind = "custom", matrix = [["0", "1", "-x"], ["-1", "0", "-y"], ["x", "y", "0"]] }

[integrals]
f = "y"
"#,
    );
    let o = liouville(&["validate", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let report = json(&o);
    assert_eq!(report["passed"], false);
    assert!(report["jacobi"].as_f64().unwrap() > 1e-6, "{report}");
}

#[test]
fn flow_started_on_z_stays_on_z() {
    let dir = TempDir::new().unwrap();
    let file = export(dir.path(), "tw_model(2,1)");
    let o = liouville(&[
        "flow",
        file.to_str().unwrap(),
        "--integral",
        "f2",
        "--x0",
        "0.1,0.2,0,0.5",
        "--dt",
        "0.01",
        "--T",
        "5",
        "--method",
        "rk4",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = csv(&stdout(&o));
    assert_eq!(header, ["t", "theta1", "theta2", "a1", "a2", "drift"]);
    assert_eq!(rows.len(), 501);
    assert!(rows.iter().all(|r| r[3] == 0.0));
    // The flow of a2 moves theta2 backwards at unit speed.
    let last = rows.last().unwrap();
    assert!((last[2] - (0.2 - 5.0)).abs() < 1e-9, "{last:?}");
}

#[test]
fn flow_conserves_oscillator_energy() {
    let dir = TempDir::new().unwrap();
    let file = export(dir.path(), "oscillator_b");
    let out = dir.path().join("traj.csv");
    let o = liouville(&[
        "flow",
        file.to_str().unwrap(),
        "--integral",
        "H",
        "--x0",
        "0.1,0.8,-0.3,0.7,0.2,0.5",
        "--dt",
        "1e-2",
        "--T",
        "100",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, rows) = csv(&std::fs::read_to_string(out).unwrap());
    let drift = rows.iter().map(|r| r[r.len() - 1]).fold(0.0, f64::max);
    assert!(drift <= 1e-4, "drift {drift}");
}

#[test]
fn flow_reports_dimension_mismatch_as_usage_error() {
    let dir = TempDir::new().unwrap();
    let file = export(dir.path(), "tw_model(2,1)");
    let o = liouville(&["flow", file.to_str().unwrap(), "--integral", "f1", "--x0", "0,0,0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("dimension"), "{}", stderr(&o));
    let o = liouville(&["flow", file.to_str().unwrap(), "--integral", "nope", "--x0", "0,0,0,0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_file_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let file = write(dir.path(), "bad.toml", "[system]\nname = \"x\"\n");
    let o = liouville(&["validate", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = liouville(&["validate", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn actions_on_canonical_and_twisted_models() {
    let dir = TempDir::new().unwrap();
    let file = export(dir.path(), "can_model(2)");
    let o = liouville(&["actions", file.to_str().unwrap(), "--point", "0.1,0.2,0.3,1.7"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = json(&o);
    let a: Vec<f64> = r["actions"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!((a[0] - 0.3).abs() < 1e-6 && (a[1] - 1.7).abs() < 1e-6, "{a:?}");

    let file = export(dir.path(), "tw_model(2,2.5)");
    let o = liouville(&["actions", file.to_str().unwrap(), "--point", "0.1,0.2,0,0.7"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = json(&o);
    assert!(r["actions"][0].is_null());
    assert!((r["actions"][1].as_f64().unwrap() - 0.7).abs() < 1e-6, "{r}");
    assert!((r["modular_period"].as_f64().unwrap() - 2.5).abs() < 1e-6, "{r}");
    assert_eq!(r["singular"][0]["c"].as_f64().unwrap(), 2.5);
}

#[test]
fn actions_refuse_singular_points() {
    let dir = TempDir::new().unwrap();
    let file = export(dir.path(), "oscillator(1)");
    let o = liouville(&["actions", file.to_str().unwrap(), "--point", "0,0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("not a regular point"), "{}", stderr(&o));
}

#[test]
fn lift_writes_a_valid_system() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("lift.toml");
    let o = liouville(&[
        "lift",
        "--base",
        "S1xR2",
        "--action",
        "rot(theta);rotation(x1,x2)",
        "--kind",
        "twisted_b:c=1",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("warning"));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("twisted_b") && text.contains("log(abs("), "{text}");
    // Two integrals on a 6-dimensional phase space: involutive and independent, but too few.
    let o = liouville(&["validate", out.to_str().unwrap()]);
    let r = json(&o);
    assert_eq!(r["involutivity"]["max"].as_f64().unwrap(), 0.0);
    assert_eq!(r["integral_count"]["found"], 2);
    assert_eq!(r["integral_count"]["expected"], 3);
    assert_eq!(o.status.code(), Some(1));

    let o = liouville(&["lift", "--base", "T2", "--action", "rot(theta1);rot(theta2)", "--kind", "canonical"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = write(dir.path(), "t2.toml", &stdout(&o));
    assert_eq!(liouville(&["validate", out.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn lift_rejects_non_commuting_generators() {
    let o = liouville(&["lift", "--base", "R2", "--action", "scale(x1);rotation(x1,x2)", "--kind", "canonical"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!stderr(&o).is_empty());
}

#[test]
fn catalog_lists_and_rejects_unknown_ids() {
    let o = liouville(&["catalog"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for id in ["can_model", "tw_model", "bdarboux", "oscillator_b", "hyperbolic", "focusfocus", "affine", "poisson_product"] {
        assert!(text.contains(id), "missing {id}");
    }
    let o = liouville(&["catalog", "export", "nonsense(3)"]);
    assert_eq!(o.status.code(), Some(2));
}
