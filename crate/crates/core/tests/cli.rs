use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ccfinder::cli::{read_trace_csv, ConfigFile};
use ccfinder::{build_configuration, mass_m1, FamilyParams};
use serde_json::Value;

const SQRT3: &str = "1.7320508075688772";

fn ccfinder(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccfinder"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = ccfinder(args);
    assert!(out.status.success(), "{:?}: {}", args, String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn num(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("{key} missing in {v}"))
}

fn write_config(dir: &Path, name: &str, config: &ConfigFile) -> String {
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string(config).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn evaluate_anchor() {
    let v = json(&["evaluate", "1", SQRT3]);
    assert!((num(&v, "m1") - 1.0).abs() < 1e-10);
    assert!((num(&v, "m2") - 1.0).abs() < 1e-10);
    assert!(num(&v, "F").abs() < 1e-10);
    assert!(v["lambdas"].is_null());
}

#[test]
fn evaluate_accepts_sqrt3_token() {
    assert_eq!(json(&["evaluate", "1", "sqrt3"]), json(&["evaluate", "1", SQRT3]));
}

#[test]
fn evaluate_unit_height() {
    let v = json(&["evaluate", "1", "1"]);
    assert_eq!(num(&v, "m1"), 0.0);
    assert_eq!(num(&v, "F"), -num(&v, "m2"));
}

#[test]
fn evaluate_with_mass_reports_lambdas() {
    let v = json(&["evaluate", "1", SQRT3, "1"]);
    let l = &v["lambdas"];
    let full = num(&v, "lambda_full");
    for key in ["rect_x", "rect_y", "apex_x"] {
        assert!((num(l, key) - full).abs() < 1e-10, "{key}");
    }
    assert!(num(&v, "residual") < 1e-10);
}

#[test]
fn evaluate_domain_error_exits_two() {
    let out = ccfinder(&["evaluate", "-1", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("domain"));
}

#[test]
fn trace_csv_contains_anchor() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let out = ccfinder(&["trace", "1.5", "2.0", "0.01", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("y,x,m,lambda,dFdx,residual\n"));
    let rows = read_trace_csv(&text).unwrap();
    assert!(rows.windows(2).all(|w| w[1].0 > w[0].0));
    assert!(rows
        .iter()
        .any(|&(y, x, _)| (y - 3f64.sqrt()).abs() < 1e-15 && (x - 1.0).abs() < 1e-6));
    for line in text.lines().skip(1) {
        let residual: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(residual < 1e-10);
        // 17 significant digits in every field
        for field in line.split(',') {
            let mantissa = field.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17, "{field}");
        }
    }
}

#[test]
fn trace_of_empty_range_is_anchor_row() {
    let out = ccfinder(&["trace", "sqrt3", "sqrt3", "0.01"]);
    assert!(out.status.success());
    let rows = read_trace_csv(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(rows.len(), 1);
    assert!((rows[0].1 - 1.0).abs() < 1e-10);
}

#[test]
fn trace_json_has_points_and_terminations() {
    let v = json(&["trace", "1.6", "1.9", "0.02", "--format", "json"]);
    let points = v["points"].as_array().unwrap();
    assert!(points.len() > 10);
    for key in ["y", "x", "m", "lambda", "dFdx", "residual"] {
        assert!(points[0][key].is_f64(), "{key}");
    }
    assert_eq!(v["lower_termination"], "range-exhausted");
    assert_eq!(v["upper_termination"], "range-exhausted");
}

#[test]
fn trace_bad_range_exits_two() {
    assert_eq!(ccfinder(&["trace", "1.8", "2.0", "0.01"]).status.code(), Some(2));
    assert_eq!(ccfinder(&["trace", "1.5", "2.0", "0.5"]).status.code(), Some(2));
}

#[test]
fn trace_is_deterministic() {
    let a = ccfinder(&["trace", "1.4", "2.1", "0.01"]);
    let b = ccfinder(&["trace", "1.4", "2.1", "0.01"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_examples() {
    let dir = tempfile::tempdir().unwrap();
    let hex = ConfigFile::from_configuration(&build_configuration(&FamilyParams::anchor()));
    let v = json(&["verify", &write_config(dir.path(), "hex.json", &hex)]);
    assert_eq!(v["verdict"], "PASS");

    let mut heavy = hex.clone();
    heavy.masses[4] = 2.0;
    heavy.masses[5] = 2.0;
    let v = json(&["verify", &write_config(dir.path(), "heavy.json", &heavy)]);
    assert_eq!(v["verdict"], "FAIL");
    assert!(num(&v["direct"], "max_norm") > 1e-3);

    let pair = ConfigFile {
        positions: vec![[-1.0, 0.0], [1.0, 0.0]],
        masses: vec![1.0, 1.0],
    };
    let v = json(&["verify", &write_config(dir.path(), "pair.json", &pair)]);
    assert_eq!(v["verdict"], "PASS");
    assert_eq!(num(&v, "lambda"), 0.25);
}

#[test]
fn verify_centers_first() {
    let dir = tempfile::tempdir().unwrap();
    let shifted = ConfigFile {
        positions: vec![[9.0, 4.0], [11.0, 4.0]],
        masses: vec![1.0, 1.0],
    };
    let v = json(&["verify", &write_config(dir.path(), "s.json", &shifted)]);
    assert_eq!(v["verdict"], "PASS");
    assert_eq!(v["center_of_mass"][0].as_f64(), Some(10.0));
}

#[test]
fn verify_tolerance_flag() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = ConfigFile::from_configuration(&build_configuration(&FamilyParams::anchor()));
    c.masses[4] = 1.0 + 1e-6;
    c.masses[5] = 1.0 + 1e-6;
    let path = write_config(dir.path(), "c.json", &c);
    assert_eq!(json(&["verify", &path])["verdict"], "FAIL");
    assert_eq!(json(&["verify", &path, "--tol", "1e-3"])["verdict"], "PASS");
}

#[test]
fn verify_rejects_bad_files() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = dir.path().join("g.json");
    fs::write(&garbage, "{ not json").unwrap();
    assert_eq!(ccfinder(&["verify", garbage.to_str().unwrap()]).status.code(), Some(2));

    let collide = ConfigFile {
        positions: vec![[0.0, 0.0], [0.0, 0.0]],
        masses: vec![1.0, 1.0],
    };
    let path = write_config(dir.path(), "c.json", &collide);
    assert_eq!(ccfinder(&["verify", &path]).status.code(), Some(2));

    let near = ConfigFile {
        positions: vec![[0.0, 0.0], [1e-12, 0.0]],
        masses: vec![1.0, 1.0],
    };
    let path = write_config(dir.path(), "n.json", &near);
    assert_eq!(ccfinder(&["verify", &path]).status.code(), Some(2));

    let mismatch = dir.path().join("m.json");
    fs::write(&mismatch, r#"{"positions": [[0,0],[1,0]], "masses": [1]}"#).unwrap();
    assert_eq!(ccfinder(&["verify", mismatch.to_str().unwrap()]).status.code(), Some(2));

    assert_eq!(ccfinder(&["verify", "/nonexistent/file.json"]).status.code(), Some(2));
}

#[test]
fn masses_examples() {
    let v = json(&["masses", "1", SQRT3]);
    assert_eq!(v["nullspace_dim"], 1);
    assert_eq!(v["valid"], true);
    for m in v["masses"].as_array().unwrap() {
        assert!((m.as_f64().unwrap() - 1.0).abs() < 1e-10);
    }
    assert!(v["symmetry"]["gaps"].as_array().unwrap().iter().all(|g| g.as_f64().unwrap() < 1e-10));

    let v = json(&["masses", "1", "2.5"]);
    assert_eq!(v["nullspace_dim"], 0);
    assert!(num(&v, "smallest_singular_value") > 1e-6);
    assert!(v["masses"].is_null());
    assert_eq!(v["message"], "no central configuration at this geometry");
}

#[test]
fn masses_at_traced_point() {
    let out = ccfinder(&["trace", "1.5", "2.0", "0.05"]);
    let rows = read_trace_csv(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let (y, x, m) = rows[0];
    let v = json(&["masses", &format!("{x:.17e}"), &format!("{y:.17e}")]);
    assert_eq!(v["nullspace_dim"], 1);
    let masses = v["masses"].as_array().unwrap();
    assert!((masses[4].as_f64().unwrap() - m).abs() < 1e-7);
    assert!((masses[5].as_f64().unwrap() - mass_m1(x, y).unwrap()).abs() < 1e-7);
}

#[test]
fn masses_csv_format() {
    let out = ccfinder(&["masses", "1", "sqrt3", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("key,value\n"));
    assert!(text.contains("\nnullspace_dim,1\n"));
    assert!(text.contains("\nmasses.5,"));
}

#[test]
fn certify_examples() {
    let v = json(&["certify", "1", "sqrt3"]);
    assert!((num(&v, "dm1_dx") - 0.25).abs() < 1e-7);
    let exact = 0.5 * (9.0 - 16.0 * 3f64.sqrt()) / (27.0 + 4.0 * 3f64.sqrt());
    assert!((num(&v, "dm2_dx") - exact).abs() < 1e-7);
    assert!((num(&v, "dF_dx") - (0.25 - exact)).abs() < 1e-7);
    assert_eq!(v["certified"], true);
    assert!(num(&v, "dm1_dx_error") < 1e-7);

    // a point the tracer accepted away from the anchor
    let out = ccfinder(&["trace", "1.4", "2.1", "0.05"]);
    let rows = read_trace_csv(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let (y, x, _) = *rows.last().unwrap();
    let v = json(&["certify", &format!("{x:.17e}"), &format!("{y:.17e}")]);
    assert!(num(&v, "dF_dx").abs() > 1e-6);
    assert_eq!(v["certified"], true);
}

#[test]
fn trace_rows_verify_as_configurations() {
    let dir = tempfile::tempdir().unwrap();
    let out = ccfinder(&["trace", "1.4", "2.1", "0.05"]);
    let rows = read_trace_csv(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!(rows.len() > 5);
    for (i, (y, x, m)) in rows.into_iter().enumerate() {
        let config = build_configuration(&FamilyParams::new(x, y, m).unwrap());
        let path = write_config(dir.path(), &format!("p{i}.json"), &ConfigFile::from_configuration(&config));
        let v = json(&["verify", &path, "--tol", "1e-10"]);
        assert_eq!(v["verdict"], "PASS", "row {i}: y={y} x={x} m={m}");
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(ccfinder(&[]).status.code(), Some(2));
    assert_eq!(ccfinder(&["evaluate", "1"]).status.code(), Some(2));
    assert_eq!(ccfinder(&["evaluate", "1", "two"]).status.code(), Some(2));
    assert_eq!(ccfinder(&["masses", "1", "2", "--format", "xml"]).status.code(), Some(2));
}
