use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;

use serde_json::json;
use zas_core::geometry::{adm_mass, check_penrose, classify_zas, ExtendedMass};
use zas_core::models::{load_profile, parse_profile};
use zas_core::Error;

fn shipped(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../profiles").join(name)
}

fn power_law_two() -> serde_json::Value {
    let fp = 4.0 * PI;
    json!({
        "coordinate": {"name": "r", "start": 0.0},
        "segments": [
            {"kind": "power_law", "params": {"coefficient": fp, "exponent": 2.0}, "interval": [0.0, 1.0]},
            {"kind": "cubic_hermite", "params": {"a0": fp, "da0": 2.0 * fp, "a1": 4.0 * fp, "da1": 4.0 * fp}, "interval": [1.0, 2.0]}
        ],
        "tail": {"kind": "flat", "params": {}}
    })
}

fn parse(v: &serde_json::Value) -> zas_core::Result<zas_core::geometry::RadialProfile> {
    parse_profile(&v.to_string())
}

#[test]
fn power_law_two_is_removable() {
    let r = classify_zas(&parse(&power_law_two()).unwrap()).unwrap();
    assert!(r.removable);
    assert_eq!(r.mass, ExtendedMass::Finite(0.0));
}

#[test]
fn shipped_files_load() {
    let p = load_profile(shipped("flat_minus_point.json")).unwrap();
    let r = classify_zas(&p).unwrap();
    assert!(r.removable && r.mass == ExtendedMass::Finite(0.0));
    assert!(classify_zas(&load_profile(shipped("power_law_2.json")).unwrap()).unwrap().removable);

    let cyl = load_profile(shipped("cylinder_then_schwarzschild.json")).unwrap();
    assert_eq!(adm_mass(&cyl).unwrap(), 1.0);
    assert!(check_penrose(&cyl).unwrap().equality);
}

#[test]
fn file_roundtrip_through_disk() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, "{}", power_law_two()).unwrap();
    assert!(load_profile(f.path()).is_ok());
}

#[test]
fn missing_file_is_io() {
    assert!(matches!(load_profile("/nonexistent/profile.json"), Err(Error::Io(_))));
}

#[test]
fn nonpositive_area_is_rejected() {
    let mut v = power_law_two();
    v["segments"] = json!([
        {"kind": "sin_bump", "params": {"eps": -0.5}, "interval": [0.0, 6.0]}
    ]);
    assert!(matches!(parse(&v), Err(Error::Validation(_))), "{:?}", parse(&v));
}

#[test]
fn missing_tail_kind_is_rejected() {
    let mut v = power_law_two();
    v["tail"] = json!({"params": {}});
    assert!(matches!(parse(&v), Err(Error::Validation(_))));
    v.as_object_mut().unwrap().remove("tail");
    assert!(matches!(parse(&v), Err(Error::Validation(_))));
}

#[test]
fn unknown_fields_are_rejected() {
    let mut v = power_law_two();
    v["colour"] = json!("blue");
    assert!(matches!(parse(&v), Err(Error::Parse(_))));
    let mut v = power_law_two();
    v["segments"][0]["params"]["scale"] = json!(2.0);
    assert!(matches!(parse(&v), Err(Error::Parse(_))));
    let mut v = power_law_two();
    v["segments"][0]["kind"] = json!("spline");
    assert!(matches!(parse(&v), Err(Error::Parse(_))));
}

#[test]
fn coordinate_must_be_contiguous_and_increasing() {
    let mut v = power_law_two();
    v["segments"][1]["interval"] = json!([1.5, 2.0]);
    assert!(matches!(parse(&v), Err(Error::Validation(_))));
    let mut v = power_law_two();
    v["segments"][1]["interval"] = json!([1.0, 0.5]);
    assert!(matches!(parse(&v), Err(Error::Validation(_))));
}

#[test]
fn area_jump_is_rejected() {
    let mut v = power_law_two();
    v["segments"][1]["params"]["a0"] = json!(20.0);
    assert!(matches!(parse(&v), Err(Error::Validation(_))));
}

#[test]
fn malformed_json_is_parse_error() {
    assert!(matches!(parse_profile("{ not json"), Err(Error::Parse(_))));
}

#[test]
fn tail_inside_horizon_is_rejected() {
    let mut v = power_law_two();
    v["tail"] = json!({"kind": "schwarzschild", "params": {"m": 5.0}});
    assert!(matches!(parse(&v), Err(Error::Validation(_))));
}
