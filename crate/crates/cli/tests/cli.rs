use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_casimir-de"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn num(v: &Value, key: &str) -> f64 {
    v["results"][key].as_f64().unwrap_or_else(|| panic!("missing {key}"))
}

fn schema_check(v: &Value) {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/schema/report.schema.json")).unwrap();
    let schema: Value = serde_json::from_str(&text).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

#[test]
fn cylinder_plane_energy() {
    let v = json(&["energy", "--geometry", "cylinder-plane", "--kernel", "electrostatic", "--a", "0.001", "--R", "1"]);
    schema_check(&v);
    assert!((num(&v, "pfa") - 70.25).abs() < 0.01);
    assert!((num(&v, "de_total") - 70.254).abs() < 1e-3);
    assert_eq!(v["validity"]["a_over_r"], 0.001);
}

#[test]
fn sphere_plane_dirichlet_ratio() {
    let v = json(&["energy", "--geometry", "sphere-plane", "--kernel", "dirichlet", "--a", "0.01", "--R", "1"]);
    schema_check(&v);
    assert!((num(&v, "de_total") / num(&v, "pfa") - 1.00333).abs() < 5e-6);
}

#[test]
fn missing_radius_is_a_usage_error() {
    let out = run(&["energy", "--geometry", "sphere-plane", "--kernel", "dirichlet", "--a", "0.01"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--R"));
    assert_eq!(run(&["energy", "--nonsense"]).status.code(), Some(1));
    assert_eq!(run(&["energy", "--geometry", "torus", "--a", "1"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn neumann_at_finite_temperature_is_refused() {
    let out = run(&[
        "energy", "--geometry", "sphere-plane", "--kernel", "neumann", "--a", "0.01", "--R", "1",
        "--inverse-temperature", "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("nonanalytic") && msg.contains("Matsubara"), "{msg}");
}

#[test]
fn beta_table() {
    let out = run(&["tables", "--which", "beta"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "case,expression,beta");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("D,2/3,0.666666"));
}

#[test]
fn thermal_ratio_table() {
    let out = run(&["tables", "--which", "thermal-ratio"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = 0;
    for line in text.lines().skip(1) {
        let gap: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert!(gap <= 1e-3, "{line}");
        rows += 1;
    }
    assert_eq!(rows, 6);
    assert_eq!(run(&["tables", "--which", "bogus"]).status.code(), Some(1));
}

#[test]
fn beta_extract() {
    let v = json(&["beta-extract", "--kernel", "electrostatic", "--geometry", "cylinder-plane"]);
    schema_check(&v);
    assert!((num(&v, "beta") - 1.0 / 3.0).abs() < 1e-3);
}

#[test]
fn form_factor_scan() {
    let out = run(&["form-factor", "--kernel", "dirichlet", "--a", "1", "--kmax", "0.1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,f2,chi,beta"));
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((first[2] + 0.009139).abs() < 5e-6, "{first:?}");
    assert_eq!(text.lines().count(), 17);

    let v = json(&["form-factor", "--kernel", "dirichlet", "--a", "1", "--kmax", "0.1", "--format", "json"]);
    schema_check(&v);
    assert_eq!(v["results"]["analyticity"], "analytic");
}

#[test]
fn casimir_polder() {
    let v = json(&["cp", "--a", "1", "--R1", "10", "--R2", "10", "--alpha0", "1"]);
    schema_check(&v);
    assert!((num(&v, "de") + 0.10557).abs() < 1e-5);
    assert!((num(&v, "plane") / num(&v, "plane_static") - 1.0).abs() < 1e-6);
}

#[test]
fn thermal_coefficients_and_force() {
    let v = json(&["thermal", "--xi", "10", "--d", "3"]);
    schema_check(&v);
    assert!((num(&v, "b0") / -0.23915 - 1.0).abs() < 1e-2);
    let f = json(&["force", "--geometry", "sphere-plane", "--kernel", "dirichlet", "--a", "0.01", "--R", "1"]);
    schema_check(&f);
    assert!(num(&f, "derjaguin_force") < 0.0);
}

#[test]
fn output_is_deterministic_and_config_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"geometry": "sphere-plane", "kernel": "dirichlet", "a": 0.5, "R": 1.0}"#).unwrap();
    let out1 = dir.path().join("one.json");
    let out2 = dir.path().join("two.json");
    for out in [&out1, &out2] {
        let status = run(&[
            "energy", "--config", cfg.to_str().unwrap(), "--a", "0.01", "--output", out.to_str().unwrap(),
        ])
        .status;
        assert!(status.success());
    }
    let a = std::fs::read(&out1).unwrap();
    assert_eq!(a, std::fs::read(&out2).unwrap());
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["inputs"]["a"], 0.01);
    assert_eq!(v["inputs"]["kernel"], "dirichlet");
    schema_check(&v);

    std::fs::write(&cfg, r#"{"not_a_flag": 1}"#).unwrap();
    assert_eq!(run(&["energy", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}
