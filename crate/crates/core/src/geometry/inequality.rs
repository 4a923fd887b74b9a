//! ADM mass, outermost minimal area enclosure, and the Penrose and ZAS
//! inequality checks.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::mass::ExtendedMass;
use crate::geometry::profile::{Point, RadialProfile};
use crate::geometry::slice::scalar_curvature;
use crate::geometry::zas::zas_mass;
use crate::numeric::roots::bisect;

/// ADM mass; exact for the declared isotropic tail.
pub fn adm_mass(p: &RadialProfile) -> Result<f64> {
    p.tail().map(|t| t.mass).ok_or(Error::NoTail)
}

/// Outermost sphere of least area.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Omae {
    pub s: f64,
    pub area: f64,
    #[serde(with = "crate::serde_ext")]
    pub mean_curvature: f64,
}

fn scan_points(p: &RadialProfile) -> Vec<Point> {
    let mut pts = Vec::new();
    for (i, seg) in p.segments().iter().enumerate() {
        if seg.is_infinite() {
            let t = p.tail().expect("infinite segment is the tail");
            let span = 4.0 * (t.x_start + t.mass.abs()) + 4.0;
            pts.extend((0..=800).map(|k| Point {
                seg: i,
                tau: span * k as f64 / 800.0,
            }));
        } else {
            pts.extend((0..=400).map(|k| Point {
                seg: i,
                tau: seg.length * k as f64 / 400.0,
            }));
        }
    }
    pts
}

pub fn omae_radius(p: &RadialProfile) -> Result<Omae> {
    let pts = scan_points(p);
    let areas: Vec<f64> = pts.iter().map(|&q| p.local(q).a.v).collect();
    let min = areas.iter().cloned().fold(f64::INFINITY, f64::min);
    let k = areas
        .iter()
        .rposition(|&a| a <= min * (1.0 + 1e-12) + 1e-300)
        .expect("nonempty scan");
    let mut best = pts[k];
    if k > 0 && k + 1 < pts.len() && pts[k - 1].seg == best.seg && pts[k + 1].seg == best.seg {
        let seg = &p.segments()[best.seg];
        let da = |t: f64| seg.local(t).a.d1;
        let (lo, hi) = (pts[k - 1].tau, pts[k + 1].tau);
        if da(lo) < 0.0 && da(hi) > 0.0 {
            best.tau = bisect(da, lo, hi, 1e-15 * hi.abs().max(1.0))?;
        }
    }
    let a = p.local(best).area_s();
    Ok(Omae {
        s: p.arclength_of(best),
        area: a.v,
        mean_curvature: if a.v > 0.0 { a.d1 / a.v } else { f64::INFINITY },
    })
}

/// Arclength probe points away from joins and from the inner boundary.
pub fn curvature_probes(p: &RadialProfile) -> Vec<f64> {
    let starts = p.segment_starts();
    let mut out = Vec::new();
    for (i, seg) in p.segments().iter().enumerate() {
        if seg.is_infinite() {
            out.extend((0..20).map(|k| starts[i] + 0.05 * 1.6f64.powi(k)));
        } else {
            let len = seg.arclength_len();
            out.extend((0..16).map(|k| starts[i] + len * (k as f64 + 0.5) / 16.0));
        }
    }
    out
}

/// Fails with `HypothesisViolated` at the first probe with `R < −1e-8`.
pub fn check_nonnegative_curvature(p: &RadialProfile) -> Result<()> {
    for s in curvature_probes(p) {
        let r = scalar_curvature(p, s)?;
        if r < -1e-8 {
            return Err(Error::HypothesisViolated { at: s, value: r });
        }
    }
    Ok(())
}

fn equality_gate(adm: f64) -> f64 {
    1e-6 * (1.0 + adm.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenroseCheck {
    pub adm: f64,
    pub horizon_area: f64,
    pub horizon_s: f64,
    pub holds: bool,
    pub equality: bool,
}

/// `m ≥ √(A/16π)` with `A` the area of the outermost minimal sphere; a
/// non-minimal inner boundary with no minimal sphere outside counts as area 0.
pub fn check_penrose(p: &RadialProfile) -> Result<PenroseCheck> {
    check_nonnegative_curvature(p)?;
    let adm = adm_mass(p)?;
    let o = omae_radius(p)?;
    let minimal = (o.mean_curvature * o.area.sqrt()).abs() <= 1e-6 || o.area == 0.0;
    let horizon_area = if minimal { o.area } else { 0.0 };
    let bound = (horizon_area / (16.0 * PI)).sqrt();
    let gate = equality_gate(adm);
    Ok(PenroseCheck {
        adm,
        horizon_area,
        horizon_s: o.s,
        holds: adm >= bound - gate,
        equality: (adm - bound).abs() <= gate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZasInequality {
    pub adm: f64,
    pub zas_mass: ExtendedMass,
    pub holds: bool,
    pub equality: bool,
}

/// `m ≥ m_ZAS` for a profile of nonnegative scalar curvature.
pub fn check_zas_inequality(p: &RadialProfile) -> Result<ZasInequality> {
    check_nonnegative_curvature(p)?;
    let adm = adm_mass(p)?;
    let m = zas_mass(p)?;
    let gate = equality_gate(adm);
    let (holds, equality) = match m {
        ExtendedMass::NegInfinity => (true, false),
        ExtendedMass::Finite(v) => (adm >= v - gate, (adm - v).abs() <= gate),
    };
    Ok(ZasInequality {
        adm,
        zas_mass: m,
        holds,
        equality,
    })
}
