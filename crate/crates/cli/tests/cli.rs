use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn zas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zas")).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    zas(args).status.code().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let o = zas(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn profile(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../profiles")
        .join(name)
        .display()
        .to_string()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["table2"]), 0);
    assert_eq!(code(&["no-such-command"]), 2);
    assert_eq!(code(&["table2", "--tol", "1e-2"]), 2);
    assert_eq!(code(&["table2", "--tol", "1e-13"]), 2);
    assert_eq!(code(&["classify", "--model", "schwarzschild:m=1"]), 2);
    assert_eq!(code(&["classify", "--model", "torus:r=1"]), 2);
    assert_eq!(code(&["classify", "--profile", "/nonexistent.json"]), 2);
    assert_eq!(code(&["classify"]), 2);
    assert_eq!(code(&["verify", "--scope", "everything"]), 2);
    assert_eq!(code(&["table2", "--format", "svg"]), 2);
}

#[test]
fn table2_cells() {
    let rows = csv_rows(&stdout(&["table2", "--format", "csv"]));
    let expect = [
        ("positive", "-inf", "false", "false", "false"),
        ("zero", "-inf", "false", "false", "false"),
        ("zero", "", "true", "true", "false"),
        ("zero", "0", "false", "false", "false"),
        ("zero", "0", "false", "false", "true"),
        ("zero", "0", "false", "false", "false"),
    ];
    assert_eq!(rows.len(), 6);
    for (r, e) in rows.iter().zip(expect) {
        assert_eq!(r[1], e.0);
        if !e.1.is_empty() {
            assert_eq!(r[3], e.1);
        }
        assert_eq!((r[4].as_str(), r[5].as_str(), r[6].as_str()), (e.2, e.3, e.4));
    }
    let m: f64 = rows[2][3].parse().unwrap();
    assert!((m + 2.0 / 9.0).abs() < 1e-6);
}

#[test]
fn cylinder_sweep_rows() {
    let rows = csv_rows(&stdout(&["cylinder-sweep", "--l-max", "8", "--steps", "3", "--format", "csv"]));
    let get = |i: usize| -> Vec<f64> { rows[i][..3].iter().map(|c| c.parse().unwrap()).collect() };
    let (r0, r1) = (get(0), get(1));
    assert_eq!(r0[0], 0.0);
    assert!((r0[1] + 1.0).abs() < 1e-9 && (r0[2] + 1.0).abs() < 1e-6, "{r0:?}");
    assert_eq!(r1[0], 4.0);
    assert!(r1[1].abs() < 1e-9 && (r1[2] + 0.25).abs() < 1e-6, "{r1:?}");
    assert!(rows.iter().all(|r| r[3] == "true"));
}

#[test]
fn csv_is_bit_stable() {
    let args = ["cylinder-sweep", "--l-max", "20", "--steps", "11", "--format", "csv"];
    let a = stdout(&args);
    assert_eq!(a, stdout(&args));
    let mut seq = args.to_vec();
    seq.push("--sequential");
    assert_eq!(a, stdout(&seq));
}

#[test]
fn files_are_written_and_json_roundtrips() {
    use zas_core::geometry::{slice_report, SliceReport};
    use zas_core::models::{build, ModelSpec};
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    stdout(&["cylinder-sweep", "--steps", "11", "--out", &out]);
    for ext in ["csv", "json", "svg"] {
        assert!(dir.path().join(format!("cylinder_sweep.{ext}")).exists(), "{ext}");
    }
    assert!(read(dir.path(), "cylinder_sweep.svg").starts_with("<svg"));

    stdout(&["report", "--model", "cylinder:mbar=1,L=4", "--out", &out, "--format", "json"]);
    let text = read(dir.path(), "report.json");
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["omae"]["mean_curvature"], "inf");
    let slices: Vec<SliceReport> = serde_json::from_value(v["slices"].clone()).unwrap();
    let p = build(&ModelSpec::SchwarzschildWithCylinder { mbar: 1.0, length: 4.0 }).unwrap().profile;
    for s in slices {
        assert_eq!(s, slice_report(&p, s.rho).unwrap());
    }
    assert!(!dir.path().join("report.svg").exists());
}

#[test]
fn classify_json_matches_core() {
    use zas_core::geometry::{classify_zas, ZasReport};
    use zas_core::models::{build, ModelSpec};
    let v: Value = serde_json::from_str(&stdout(&["classify", "--model", "schwarzschild:m=-1", "--format", "json"])).unwrap();
    let r: ZasReport = serde_json::from_value(v["report"].clone()).unwrap();
    let direct = classify_zas(&build(&ModelSpec::Schwarzschild { m: -1.0 }).unwrap().profile).unwrap();
    assert_eq!(r, direct);
    assert!(r.regular && r.harmonically_regular);
    assert!((r.mass.value() + 1.0).abs() < 1e-6);
}

#[test]
fn classify_power_law_and_custom_file() {
    let t = stdout(&["classify", "--model", "power-law:alpha=1"]);
    assert!(t.contains("mass: -inf"), "{t}");
    let t = stdout(&["classify", "--profile", &profile("flat_minus_point.json")]);
    assert!(t.contains("removable: yes"), "{t}");
    assert!(t.contains("mass: 0\n"), "{t}");
}

#[test]
fn counterexample_flips() {
    let t = stdout(&["counterexample", "--eps", "0.5,1.2", "--format", "csv"]);
    let rows = csv_rows(&t);
    assert_eq!(rows[0][2], "true");
    assert_eq!(rows[1][2], "false");
    assert!(rows[1][3].is_empty());
    let human = stdout(&["counterexample", "--eps", "0.5"]);
    let eps: f64 = human.lines().next().unwrap().trim_start_matches("threshold: eps = ").parse().unwrap();
    assert!((eps - 0.8621).abs() < 1e-3, "{human}");
}

#[test]
fn verify_radial_geometry_passes() {
    let o = zas(&["verify", "--scope", "radial_geometry", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["scope"], "radial_geometry");
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["suite"] == "radial_geometry"));
}

#[test]
fn report_lists_requested_radii() {
    let rows = csv_rows(&stdout(&["report", "--model", "schwarzschild:m=-1", "--rho", "0.5,3", "--format", "csv"]));
    assert_eq!(rows.len(), 2);
    for r in rows {
        let hawking: f64 = r[3].parse().unwrap();
        assert!((hawking + 1.0).abs() < 1e-8);
    }
}
