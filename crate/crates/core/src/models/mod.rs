//! Constructors for the concrete metrics and their closed-form references.

pub mod file;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::conformal::{compose, ConformalFactor, ConformalPair, TailFactor};
use crate::error::{Error, Result};
use crate::geometry::profile::{JetFn, RadialProfile, Segment, Tail};
use crate::numeric::Jet;

pub use file::{load_profile, parse_profile};

const FOUR_PI: f64 = 4.0 * PI;

/// How a power-law profile is continued to an asymptotically flat end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerTail {
    /// Cubic blend to `4πr²` on `[1, 2]`, flat beyond.
    Blend,
    /// Isotropic Schwarzschild matched in `A` and `A'` at `r = 1`.
    Schwarzschild,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    Flat,
    Schwarzschild { m: f64 },
    PowerLawZas { alpha: f64, tail: PowerTail },
    SchwarzschildWithCylinder { mbar: f64, length: f64 },
    SinBump { eps: f64 },
    /// `ds² = dr² + e^r dσ²` on `[0, 1]`, no asymptotic end.
    ExpWarp,
    Custom { path: String },
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSpec::Flat => write!(f, "flat"),
            ModelSpec::Schwarzschild { m } => write!(f, "schwarzschild:m={m}"),
            ModelSpec::PowerLawZas { alpha, tail } => match tail {
                PowerTail::Blend => write!(f, "power-law:alpha={alpha}"),
                PowerTail::Schwarzschild => write!(f, "power-law:alpha={alpha},tail=schwarzschild"),
            },
            ModelSpec::SchwarzschildWithCylinder { mbar, length } => write!(f, "cylinder:mbar={mbar},L={length}"),
            ModelSpec::SinBump { eps } => write!(f, "sin-bump:eps={eps}"),
            ModelSpec::ExpWarp => write!(f, "exp-warp"),
            ModelSpec::Custom { path } => write!(f, "custom:{path}"),
        }
    }
}

/// Parses `4/3`, `-0.5`, `1e-2`.
fn parse_number(s: &str) -> Result<f64> {
    let bad = || Error::InvalidSpec(format!("not a number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|_| bad())?;
            let d: f64 = d.trim().parse().map_err(|_| bad())?;
            Ok(n / d)
        }
        None => s.trim().parse().map_err(|_| bad()),
    }
}

impl FromStr for ModelSpec {
    type Err = Error;

    /// `kind[:key=value,...]`, e.g. `schwarzschild:m=-1`, `power-law:alpha=4/3`,
    /// `cylinder:mbar=1,L=4`, `sin-bump:eps=0.1`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        if kind == "custom" {
            return Ok(ModelSpec::Custom { path: rest.to_string() });
        }
        let mut params = std::collections::BTreeMap::new();
        for kv in rest.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::InvalidSpec(format!("expected key=value, got {kv:?}")))?;
            params.insert(k.trim().to_string(), v.trim().to_string());
        }
        let mut take = |key: &str| -> Result<f64> {
            let v = params
                .remove(key)
                .ok_or_else(|| Error::InvalidSpec(format!("{kind} needs parameter {key}")))?;
            parse_number(&v)
        };
        let spec = match kind {
            "flat" => ModelSpec::Flat,
            "schwarzschild" => ModelSpec::Schwarzschild { m: take("m")? },
            "power-law" | "power_law" | "power_law_zas" => {
                let alpha = take("alpha")?;
                let tail = match params.remove("tail").as_deref() {
                    None | Some("blend") => PowerTail::Blend,
                    Some("schwarzschild") => PowerTail::Schwarzschild,
                    Some(other) => return Err(Error::InvalidSpec(format!("unknown power-law tail {other:?}"))),
                };
                ModelSpec::PowerLawZas { alpha, tail }
            }
            "cylinder" | "schwarzschild_with_cylinder" => ModelSpec::SchwarzschildWithCylinder {
                mbar: take("mbar")?,
                length: take("L")?,
            },
            "sin-bump" | "sin_bump" => ModelSpec::SinBump { eps: take("eps")? },
            "exp-warp" | "exp_warp" => ModelSpec::ExpWarp,
            _ => return Err(Error::InvalidSpec(format!("unknown model kind {kind:?}"))),
        };
        if let Some(k) = params.keys().next() {
            return Err(Error::InvalidSpec(format!("unknown parameter {k:?} for {kind}")));
        }
        Ok(spec)
    }
}

/// Closed forms of the cylinder model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderReference {
    pub a: f64,
    pub b: f64,
    pub zas_mass: f64,
}

pub fn cylinder_reference(mbar: f64, length: f64) -> Result<CylinderReference> {
    if !(mbar > 0.0 && length >= 0.0) {
        return Err(Error::InvalidSpec(format!("cylinder needs mbar > 0 and L >= 0, got {mbar}, {length}")));
    }
    let a = length / (length + 4.0 * mbar);
    Ok(CylinderReference {
        a,
        b: (2.0 * a - 1.0) * mbar,
        zas_mass: -16.0 * mbar.powi(3) / (length + 4.0 * mbar).powi(2),
    })
}

/// A built model: the metric, and where one exists the conformal pair it is
/// composed from.
#[derive(Debug, Clone)]
pub struct Model {
    pub spec: ModelSpec,
    pub profile: RadialProfile,
    pub pair: Option<ConformalPair>,
    pub cylinder: Option<CylinderReference>,
}

fn cubic_hermite(a0: f64, da0: f64, a1: f64, da1: f64, h: f64) -> impl Fn(f64) -> Jet + Send + Sync + Clone {
    move |tau: f64| {
        let t = Jet::new(tau / h, 1.0 / h, 0.0);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = t3 * 2.0 - t2 * 3.0 + 1.0;
        let h10 = t3 - t2 * 2.0 + t;
        let h01 = t3 * -2.0 + t2 * 3.0;
        let h11 = t3 - t2;
        h00 * a0 + h10 * (h * da0) + h01 * a1 + h11 * (h * da1)
    }
}

/// Cubic Hermite segment in arclength from `(a0, da0)` to `(a1, da1)`.
pub fn hermite_segment(label: &str, start: f64, length: f64, a0: f64, da0: f64, a1: f64, da1: f64) -> Segment {
    Segment::arclength(label, start, length, cubic_hermite(a0, da0, a1, da1, length))
}

fn flat_tail_from(radius: f64) -> Tail {
    Tail {
        mass: 0.0,
        x_start: radius,
    }
}

fn power_law(alpha: f64, tail: PowerTail) -> Result<RadialProfile> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidSpec(format!("power law needs alpha > 0, got {alpha}")));
    }
    let core = Segment::arclength(format!("power law {alpha}"), 0.0, 1.0, move |s| {
        Jet::variable(s).powf(alpha).scale(FOUR_PI)
    });
    let p = match tail {
        PowerTail::Blend => {
            let blend = hermite_segment("blend", 1.0, 1.0, FOUR_PI, FOUR_PI * alpha, 4.0 * FOUR_PI, 4.0 * FOUR_PI);
            RadialProfile::new(vec![core, blend], Some(flat_tail_from(2.0)))?
        }
        PowerTail::Schwarzschild => {
            let m = 0.5 * (1.0 - alpha * alpha / 4.0);
            let x = 0.5 * ((1.0 - m) + (1.0 - 2.0 * m).sqrt());
            RadialProfile::new(vec![core], Some(Tail { mass: m, x_start: x }))?
        }
    };
    Ok(p.with_origin_exponent(alpha, Some(FOUR_PI)))
}

fn flat_background(x_start: f64) -> Result<RadialProfile> {
    RadialProfile::isotropic(0.0, x_start)
}

fn schwarzschild(m: f64) -> Result<Model> {
    if !m.is_finite() {
        return Err(Error::InvalidSpec(format!("schwarzschild mass {m} is not finite")));
    }
    let spec = ModelSpec::Schwarzschild { m };
    if m == 0.0 {
        return flat();
    }
    let x_start = if m < 0.0 { -0.5 * m } else { 0.25 * m };
    let mut profile = RadialProfile::isotropic(m, x_start)?;
    if m < 0.0 {
        profile = profile.with_origin_exponent(4.0 / 3.0, None);
    }
    let pair = ConformalPair::new(
        flat_background(x_start)?,
        ConformalFactor {
            pieces: vec![],
            tail: Some(TailFactor { mass: m }),
        },
    )?;
    Ok(Model {
        spec,
        profile,
        pair: Some(pair),
        cylinder: None,
    })
}

fn flat() -> Result<Model> {
    let profile = RadialProfile::isotropic(0.0, 0.0)?.with_origin_exponent(2.0, Some(FOUR_PI));
    Ok(Model {
        spec: ModelSpec::Flat,
        profile,
        pair: None,
        cylinder: None,
    })
}

/// Background of the cylinder model: a round cylinder of length `L` and
/// area `16πm̄²` glued to Schwarzschild of mass `m̄` at its horizon.
pub fn cylinder_background(mbar: f64, length: f64) -> Result<RadialProfile> {
    let tail = Tail {
        mass: mbar,
        x_start: 0.5 * mbar,
    };
    if length == 0.0 {
        return RadialProfile::new(vec![], Some(tail));
    }
    let area = 4.0 * FOUR_PI * mbar * mbar;
    let cyl = Segment::arclength("cylinder", 0.0, length, move |_| Jet::constant(area));
    RadialProfile::new(vec![cyl], Some(tail))
}

fn cylinder(mbar: f64, length: f64) -> Result<Model> {
    let reference = cylinder_reference(mbar, length)?;
    let background = cylinder_background(mbar, length)?;
    let mut pieces: Vec<JetFn> = Vec::new();
    if length > 0.0 {
        let slope = reference.a / length;
        pieces.push(Arc::new(move |t: f64| Jet::variable(t).scale(slope)));
    }
    let pair = ConformalPair::new(
        background,
        ConformalFactor {
            pieces,
            tail: Some(TailFactor { mass: reference.b }),
        },
    )?;
    let profile = compose(&pair)?;
    Ok(Model {
        spec: ModelSpec::SchwarzschildWithCylinder { mbar, length },
        profile,
        pair: Some(pair),
        cylinder: Some(reference),
    })
}

fn sin_bump(eps: f64) -> Result<RadialProfile> {
    if !(eps > 0.0) {
        return Err(Error::InvalidSpec(format!("sin bump needs eps > 0, got {eps}")));
    }
    let two_pi = 2.0 * PI;
    let bump = Segment::arclength("sin bump", 0.0, two_pi, move |t| {
        (Jet::variable(t).sin() + (1.0 + eps)).scale(FOUR_PI)
    });
    let blend = hermite_segment("blend", two_pi, 2.0, FOUR_PI * (1.0 + eps), FOUR_PI, 4.0 * FOUR_PI, 4.0 * FOUR_PI);
    RadialProfile::new(vec![bump, blend], Some(flat_tail_from(2.0)))
}

fn exp_warp() -> Result<RadialProfile> {
    let seg = Segment::arclength("exponential warp", 0.0, 1.0, |t| Jet::variable(t).exp().scale(FOUR_PI));
    RadialProfile::new(vec![seg], None)
}

pub fn build(spec: &ModelSpec) -> Result<Model> {
    let plain = |profile: RadialProfile| Model {
        spec: spec.clone(),
        profile,
        pair: None,
        cylinder: None,
    };
    match *spec {
        ModelSpec::Flat => flat(),
        ModelSpec::Schwarzschild { m } => schwarzschild(m),
        ModelSpec::PowerLawZas { alpha, tail } => Ok(plain(power_law(alpha, tail)?)),
        ModelSpec::SchwarzschildWithCylinder { mbar, length } => cylinder(mbar, length),
        ModelSpec::SinBump { eps } => Ok(plain(sin_bump(eps)?)),
        ModelSpec::ExpWarp => Ok(plain(exp_warp()?)),
        ModelSpec::Custom { ref path } => Ok(plain(load_profile(path)?)),
    }
}

/// Background and resolution function of the exponential warp, `φ̄ = r`.
pub fn exp_warp_resolution() -> Result<(RadialProfile, JetFn)> {
    Ok((exp_warp()?, Arc::new(Jet::variable)))
}

/// Round cylinder of area 4π on `[0, 3]` with `φ̄ = r̄/3`, the resolution of
/// the `α = 4/3` power law.
pub fn four_thirds_resolution() -> Result<(RadialProfile, JetFn)> {
    let seg = Segment::arclength("unit cylinder", 0.0, 3.0, |_| Jet::constant(FOUR_PI));
    Ok((RadialProfile::new(vec![seg], None)?, Arc::new(|t| Jet::variable(t).scale(1.0 / 3.0))))
}

/// Flat space outside the unit ball with the harmonic `φ̄ = 1 − 1/r`.
pub fn flat_exterior_resolution() -> Result<(RadialProfile, JetFn)> {
    Ok((
        flat_background(1.0)?,
        Arc::new(|t| Jet::constant(1.0) - (Jet::variable(t) + 1.0).recip()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cylinder_reference_examples() {
        let r = cylinder_reference(1.0, 0.0).unwrap();
        assert_eq!((r.a, r.b, r.zas_mass), (0.0, -1.0, -1.0));
        let r = cylinder_reference(1.0, 4.0).unwrap();
        assert_eq!((r.a, r.b, r.zas_mass), (0.5, 0.0, -0.25));
        let r = cylinder_reference(1.0, 12.0).unwrap();
        assert_eq!((r.a, r.b, r.zas_mass), (0.75, 0.5, -0.0625));
        assert!(cylinder_reference(0.0, 1.0).is_err());
    }

    #[test]
    fn spec_strings() {
        assert_eq!("schwarzschild:m=-1".parse::<ModelSpec>().unwrap(), ModelSpec::Schwarzschild { m: -1.0 });
        assert_eq!(
            "power-law:alpha=4/3".parse::<ModelSpec>().unwrap(),
            ModelSpec::PowerLawZas {
                alpha: 4.0 / 3.0,
                tail: PowerTail::Blend
            }
        );
        assert_eq!(
            "cylinder:mbar=1,L=4".parse::<ModelSpec>().unwrap(),
            ModelSpec::SchwarzschildWithCylinder { mbar: 1.0, length: 4.0 }
        );
        assert!("cylinder:mbar=1".parse::<ModelSpec>().is_err());
        assert!("flat:x=1".parse::<ModelSpec>().is_err());
        assert!("nonsense".parse::<ModelSpec>().is_err());
    }

    #[test]
    fn hermite_hits_endpoints() {
        let f = cubic_hermite(1.0, 2.0, 5.0, -1.0, 2.0);
        let (a, b) = (f(0.0), f(2.0));
        assert!((a.v - 1.0).abs() < 1e-15 && (a.d1 - 2.0).abs() < 1e-14);
        assert!((b.v - 5.0).abs() < 1e-14 && (b.d1 + 1.0).abs() < 1e-14);
    }

    #[test]
    fn all_models_build() {
        for s in [
            "flat",
            "schwarzschild:m=-2",
            "schwarzschild:m=1",
            "power-law:alpha=0.5",
            "power-law:alpha=3",
            "power-law:alpha=1,tail=schwarzschild",
            "cylinder:mbar=1,L=4",
            "cylinder:mbar=2,L=0",
            "sin-bump:eps=0.1",
            "exp-warp",
        ] {
            let spec: ModelSpec = s.parse().unwrap();
            build(&spec).unwrap_or_else(|e| panic!("{s}: {e}"));
        }
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(build(&ModelSpec::PowerLawZas {
            alpha: -1.0,
            tail: PowerTail::Blend
        })
        .is_err());
        assert!(build(&ModelSpec::SinBump { eps: 0.0 }).is_err());
        assert!(build(&ModelSpec::SchwarzschildWithCylinder { mbar: 1.0, length: -1.0 }).is_err());
    }
}
