//! JSON profile files.
//!
//! ```json
//! {
//!   "coordinate": {"name": "r", "start": 0.0},
//!   "segments": [
//!     {"kind": "power_law", "params": {"coefficient": 12.566370614359172, "exponent": 2.0}, "interval": [0.0, 1.0]},
//!     {"kind": "cubic_hermite", "params": {"a0": 12.56, "da0": 25.13, "a1": 50.27, "da1": 50.27}, "interval": [1.0, 2.0]}
//!   ],
//!   "tail": {"kind": "flat", "params": {}}
//! }
//! ```
//!
//! Segments other than `isotropic` are in arclength. `power_law`,
//! `sin_bump` and `exponential_warp` use the absolute coordinate; the tail
//! starts where its area matches the last segment.

use std::f64::consts::PI;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::geometry::profile::{RadialProfile, Segment, Tail};
use crate::numeric::Jet;

const FOUR_PI: f64 = 4.0 * PI;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Coordinate {
    #[allow(dead_code)]
    name: String,
    start: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentDoc {
    kind: String,
    #[serde(default)]
    params: Value,
    interval: [f64; 2],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TailDoc {
    kind: Option<String>,
    #[serde(default)]
    params: Value,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OriginDoc {
    exponent: f64,
    coefficient: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileDoc {
    coordinate: Coordinate,
    segments: Vec<SegmentDoc>,
    tail: Option<TailDoc>,
    origin_exponent: Option<OriginDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PowerLaw {
    coefficient: f64,
    exponent: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Cylinder {
    area: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SinBump {
    eps: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Hermite {
    a0: f64,
    da0: f64,
    a1: f64,
    da1: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Isotropic {
    m: f64,
    x_start: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Empty {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Mass {
    m: f64,
}

fn params<T: DeserializeOwned>(kind: &str, v: &Value) -> Result<T> {
    let v = if v.is_null() { Value::Object(Default::default()) } else { v.clone() };
    serde_json::from_value(v).map_err(|e| Error::Parse(format!("params of {kind}: {e}")))
}

fn segment(doc: &SegmentDoc) -> Result<Segment> {
    let [t0, t1] = doc.interval;
    if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
        return Err(Error::Validation(format!(
            "interval [{t0}, {t1}] of {} is not increasing",
            doc.kind
        )));
    }
    let len = t1 - t0;
    let kind = doc.kind.as_str();
    Ok(match kind {
        "power_law" => {
            let PowerLaw { coefficient, exponent } = params(kind, &doc.params)?;
            Segment::arclength(kind, t0, len, move |tau| {
                (Jet::variable(t0 + tau)).powf(exponent).scale(coefficient)
            })
        }
        "cylinder" => {
            let Cylinder { area } = params(kind, &doc.params)?;
            Segment::arclength(kind, t0, len, move |_| Jet::constant(area))
        }
        "sin_bump" => {
            let SinBump { eps } = params(kind, &doc.params)?;
            Segment::arclength(kind, t0, len, move |tau| {
                (Jet::variable(t0 + tau).sin() + (1.0 + eps)).scale(FOUR_PI)
            })
        }
        "exponential_warp" => {
            let Empty {} = params(kind, &doc.params)?;
            Segment::arclength(kind, t0, len, move |tau| Jet::variable(t0 + tau).exp().scale(FOUR_PI))
        }
        "cubic_hermite" => {
            let Hermite { a0, da0, a1, da1 } = params(kind, &doc.params)?;
            super::hermite_segment(kind, t0, len, a0, da0, a1, da1)
        }
        "isotropic" => {
            let Isotropic { m, x_start } = params(kind, &doc.params)?;
            let seg = Segment::isotropic(m, x_start, t0);
            let (lapse, area) = (seg.lapse_fn(), seg.area_fn());
            Segment::new(kind, t0, len, move |tau| lapse(tau), move |tau| area(tau))
        }
        other => return Err(Error::Parse(format!("unknown segment kind {other:?}"))),
    })
}

/// Inner radius of the isotropic chart where `4πx²(1 + m/2x)⁴ = area`.
fn tail_start(m: f64, area: f64) -> Result<f64> {
    let r = (area / FOUR_PI).sqrt();
    let disc = r * r - 2.0 * r * m;
    if !(disc >= 0.0) {
        return Err(Error::Validation(format!(
            "area {area} is inside the horizon of the mass {m} tail"
        )));
    }
    let x = 0.5 * ((r - m) + disc.sqrt());
    if !(x > 0.0) {
        return Err(Error::Validation(format!("tail of mass {m} cannot match area {area}")));
    }
    Ok(x)
}

pub fn parse_profile(text: &str) -> Result<RadialProfile> {
    let doc: ProfileDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if doc.segments.is_empty() {
        return Err(Error::Validation("profile has no segments".into()));
    }
    let mut expected = doc.coordinate.start;
    let mut segments = Vec::with_capacity(doc.segments.len());
    for (i, s) in doc.segments.iter().enumerate() {
        if s.interval[0] != expected {
            return Err(Error::Validation(format!(
                "segment {i} starts at {} but the previous one ends at {expected}",
                s.interval[0]
            )));
        }
        expected = s.interval[1];
        segments.push(segment(s)?);
    }
    let tail_doc = doc
        .tail
        .ok_or_else(|| Error::Validation("profile has no tail".into()))?;
    let kind = tail_doc
        .kind
        .ok_or_else(|| Error::Validation("tail has no kind".into()))?;
    let m = match kind.as_str() {
        "flat" => {
            let Empty {} = params("flat tail", &tail_doc.params)?;
            0.0
        }
        "schwarzschild" => params::<Mass>("schwarzschild tail", &tail_doc.params)?.m,
        other => return Err(Error::Parse(format!("unknown tail kind {other:?}"))),
    };
    let last = segments.last().expect("nonempty");
    let end_area = last.local(last.length).a.v;
    let tail = Tail {
        mass: m,
        x_start: tail_start(m, end_area)?,
    };
    let mut profile = RadialProfile::new(segments, Some(tail))?;
    let first = &doc.segments[0];
    if let Some(o) = doc.origin_exponent {
        profile = profile.with_origin_exponent(o.exponent, o.coefficient);
    } else if first.kind == "power_law" && first.interval[0] == 0.0 {
        let p: PowerLaw = params("power_law", &first.params)?;
        profile = profile.with_origin_exponent(p.exponent, Some(p.coefficient));
    }
    Ok(profile)
}

pub fn load_profile(path: impl AsRef<Path>) -> Result<RadialProfile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_profile(&text)
}
