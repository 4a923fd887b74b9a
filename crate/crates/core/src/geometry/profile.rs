//! Piecewise spherically symmetric metrics `w(t)²dt² + (A(t)/4π)dσ²`.
//!
//! Each segment is parametrized by a local offset `τ ≥ 0` from its start so
//! that quantities near a zero area singularity keep full relative precision.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numeric::quadrature::{adaptive, integrate_from_singular, integrate_span};
use crate::numeric::roots::safeguarded_newton;
use crate::numeric::Jet;

pub type JetFn = Arc<dyn Fn(f64) -> Jet + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// Numerical tolerances carried by a profile.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerances {
    pub quad: f64,
    pub limit: f64,
    pub ode: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quad: 1e-10,
            limit: 1e-6,
            ode: 1e-10,
        }
    }
}

/// Value and derivatives of the metric coefficients at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Local {
    /// Lapse and area as jets in the native local coordinate.
    pub w: Jet,
    pub a: Jet,
}

impl Local {
    /// Area and its first two arclength derivatives.
    pub fn area_s(&self) -> Jet {
        let (w, a) = (self.w, self.a);
        Jet::new(a.v, a.d1 / w.v, (a.d2 * w.v - a.d1 * w.d1) / (w.v * w.v * w.v))
    }

    /// Arclength derivatives of a function given as a jet in the native
    /// coordinate.
    pub fn to_arclength(&self, f: Jet) -> Jet {
        let w = self.w;
        Jet::new(f.v, f.d1 / w.v, (f.d2 * w.v - f.d1 * w.d1) / (w.v * w.v * w.v))
    }
}

/// A position on a profile: segment index and local offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub seg: usize,
    pub tau: f64,
}

/// One smooth piece of a profile.
#[derive(Clone)]
pub struct Segment {
    pub label: String,
    /// Native coordinate at the segment start.
    pub start: f64,
    /// Native length; infinite only for the asymptotic tail.
    pub length: f64,
    lapse: JetFn,
    area: JetFn,
    unit_lapse: bool,
    arclength_closed: Option<ScalarFn>,
    flux_to_infinity: Option<ScalarFn>,
    // Derived at profile construction.
    lapse_exponent: f64,
    arclength: f64,
}

impl fmt::Debug for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Segment")
            .field("label", &self.label)
            .field("start", &self.start)
            .field("length", &self.length)
            .field("unit_lapse", &self.unit_lapse)
            .finish()
    }
}

impl Segment {
    pub fn new(
        label: impl Into<String>,
        start: f64,
        length: f64,
        lapse: impl Fn(f64) -> Jet + Send + Sync + 'static,
        area: impl Fn(f64) -> Jet + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            start,
            length,
            lapse: Arc::new(lapse),
            area: Arc::new(area),
            unit_lapse: false,
            arclength_closed: None,
            flux_to_infinity: None,
            lapse_exponent: 0.0,
            arclength: f64::NAN,
        }
    }

    /// A segment already written in arclength (`w ≡ 1`).
    pub fn arclength(
        label: impl Into<String>,
        start: f64,
        length: f64,
        area: impl Fn(f64) -> Jet + Send + Sync + 'static,
    ) -> Self {
        let mut s = Self::new(label, start, length, |_| Jet::constant(1.0), area);
        s.unit_lapse = true;
        s
    }

    pub(crate) fn from_arcs(label: String, start: f64, length: f64, lapse: JetFn, area: JetFn, unit: bool) -> Self {
        Self {
            label,
            start,
            length,
            lapse,
            area,
            unit_lapse: unit,
            arclength_closed: None,
            flux_to_infinity: None,
            lapse_exponent: 0.0,
            arclength: f64::NAN,
        }
    }

    /// Isotropic Schwarzschild of mass `m` on `x ≥ x_start`, `x = x_start + τ`.
    /// With `m = 0` this is flat space.
    pub fn isotropic(mass: f64, x_start: f64, t_start: f64) -> Self {
        let c = x_start + 0.5 * mass;
        let q = move |tau: f64| {
            if mass == 0.0 {
                return Jet::constant(1.0);
            }
            let x = Jet::variable(tau) + x_start;
            (Jet::variable(tau) + c) / x
        };
        let lapse = move |tau: f64| q(tau).powi(2);
        let area = move |tau: f64| {
            let x = Jet::variable(tau) + x_start;
            (x * x * q(tau).powi(4)).scale(FOUR_PI)
        };
        let label = if mass == 0.0 { "flat" } else { "schwarzschild" };
        let mut seg = Self::new(label, t_start, f64::INFINITY, lapse, area);
        seg.unit_lapse = mass == 0.0;
        // Closed form ∫w dx = x + m ln x − m²/(4x); used away from x_start
        // where it does not cancel.
        let prim = move |x: f64| x + mass * x.ln() - mass * mass / (4.0 * x);
        seg.arclength_closed = Some(Arc::new(move |tau: f64| prim(x_start + tau) - prim(x_start)));
        seg.flux_to_infinity = Some(Arc::new(move |tau: f64| 1.0 / (FOUR_PI * (c + tau))));
        seg
    }

    pub fn end(&self) -> f64 {
        self.start + self.length
    }

    pub fn is_infinite(&self) -> bool {
        self.length.is_infinite()
    }

    pub fn has_unit_lapse(&self) -> bool {
        self.unit_lapse
    }

    pub fn local(&self, tau: f64) -> Local {
        Local {
            w: (self.lapse)(tau),
            a: (self.area)(tau),
        }
    }

    pub fn lapse_fn(&self) -> JetFn {
        self.lapse.clone()
    }

    pub fn area_fn(&self) -> JetFn {
        self.area.clone()
    }

    pub(crate) fn flux_to_infinity_fn(&self) -> Option<ScalarFn> {
        self.flux_to_infinity.clone()
    }

    pub(crate) fn with_flux_to_infinity(mut self, f: ScalarFn) -> Self {
        self.flux_to_infinity = Some(f);
        self
    }

    /// Total arclength of the segment.
    pub fn arclength_len(&self) -> f64 {
        self.arclength
    }

    /// `∫_0^τ w`.
    pub fn arclength_to(&self, tau: f64) -> f64 {
        if tau <= 0.0 {
            return 0.0;
        }
        if self.unit_lapse {
            return tau;
        }
        if let Some(closed) = &self.arclength_closed {
            if tau >= 1.0 {
                return closed(tau);
            }
        }
        let w = |t: f64| (self.lapse)(t).v;
        let r = if self.lapse_exponent < 0.0 {
            integrate_from_singular(&w, 0.0, tau, self.lapse_exponent, 1e-12)
        } else {
            adaptive(&w, 0.0, tau, 1e-12)
        };
        r.unwrap_or_else(|_| adaptive(&w, 0.0, tau, 1e-9).unwrap_or(f64::NAN))
    }

    /// Local offset at arclength `sigma` from the segment start.
    pub fn tau_at(&self, sigma: f64) -> f64 {
        if sigma <= 0.0 {
            return 0.0;
        }
        if self.unit_lapse {
            return sigma.min(self.length);
        }
        if !self.is_infinite() && sigma >= self.arclength {
            return self.length;
        }
        let mut hi = if self.is_infinite() { sigma.max(1e-300) } else { sigma.min(self.length) };
        while self.arclength_to(hi) < sigma {
            hi *= 2.0;
            if !self.is_infinite() && hi >= self.length {
                hi = self.length;
                break;
            }
        }
        let mut lo = hi;
        loop {
            lo *= 0.5;
            if self.arclength_to(lo) < sigma || lo < 1e-300 {
                break;
            }
        }
        let g = |y: f64| {
            let tau = y.exp();
            let s = self.arclength_to(tau);
            let w = (self.lapse)(tau).v;
            ((s / sigma).ln(), tau * w / s)
        };
        let (ylo, yhi) = (lo.max(1e-300).ln(), hi.ln());
        match safeguarded_newton(g, ylo, yhi, 0.5 * (ylo + yhi), 1e-15) {
            Ok(y) => y.exp(),
            Err(_) => {
                // The bracket endpoint itself is the root (or is within rounding of it).
                if (self.arclength_to(hi) - sigma).abs() <= (self.arclength_to(lo) - sigma).abs() {
                    hi
                } else {
                    lo
                }
            }
        }
    }

    /// `∫_{τ0}^{τ1} w/A` for `τ1` finite.
    pub fn flux_between(&self, tau0: f64, tau1: f64, rel_tol: f64) -> Result<f64> {
        if tau1 <= tau0 {
            return Ok(0.0);
        }
        let g = |t: f64| {
            let l = self.local(t);
            l.w.v / l.a.v
        };
        if tau0 > 0.0 {
            integrate_span(&g, tau0, tau1, rel_tol)
        } else {
            adaptive(&g, tau0, tau1, rel_tol)
        }
    }

    fn probe_lapse_exponent(&self) -> f64 {
        let scale = if self.is_infinite() { 1.0 } else { self.length.min(1.0) };
        let (t1, t2) = (1e-8 * scale, 1e-6 * scale);
        let (w1, w2) = ((self.lapse)(t1).v, (self.lapse)(t2).v);
        if w1 > 0.0 && w2 > 0.0 {
            let slope = (w2 / w1).ln() / (t2 / t1).ln();
            if slope < -0.01 {
                return slope;
            }
        }
        0.0
    }
}

/// Asymptotic end: isotropic Schwarzschild of the given mass (zero for flat).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tail {
    pub mass: f64,
    pub x_start: f64,
}

/// Declared power law `A(s) ≈ c·s^p` at the inner boundary, `s` arclength.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OriginExponent {
    pub exponent: f64,
    pub coefficient: Option<f64>,
}

/// A validated piecewise radial metric.
#[derive(Clone, Debug)]
pub struct RadialProfile {
    segments: Vec<Segment>,
    seg_s: Vec<f64>,
    seg_flux: Vec<Option<f64>>,
    tail: Option<Tail>,
    origin: Option<OriginExponent>,
    tol: Tolerances,
    c1: bool,
}

impl RadialProfile {
    /// Builds a profile from finite segments followed by an optional
    /// Schwarzschild/flat tail.
    pub fn new(mut segments: Vec<Segment>, tail: Option<Tail>) -> Result<Self> {
        if let Some(t) = tail {
            let t_start = segments.last().map(|s| s.end()).unwrap_or(t.x_start);
            segments.push(Segment::isotropic(t.mass, t.x_start, t_start));
        }
        Self::from_parts(segments, tail, None, Tolerances::default())
    }

    /// A profile that is a single tail segment, e.g. Schwarzschild or flat.
    pub fn isotropic(mass: f64, x_start: f64) -> Result<Self> {
        Self::new(Vec::new(), Some(Tail { mass, x_start }))
    }

    pub(crate) fn from_parts(
        mut segments: Vec<Segment>,
        tail: Option<Tail>,
        origin: Option<OriginExponent>,
        tol: Tolerances,
    ) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Validation("profile has no segments".into()));
        }
        for (i, seg) in segments.iter().enumerate() {
            let last = i + 1 == segments.len();
            if !(seg.length > 0.0) {
                return Err(Error::Validation(format!("segment {i} ({}) has nonpositive length", seg.label)));
            }
            if seg.is_infinite() && !(last && seg.flux_to_infinity.is_some()) {
                return Err(Error::Validation(format!(
                    "segment {i} ({}) is infinite but is not a declared tail",
                    seg.label
                )));
            }
        }
        if tail.is_some() != segments.last().map(|s| s.is_infinite()).unwrap_or(false) {
            return Err(Error::Validation("tail declaration does not match the final segment".into()));
        }
        for seg in segments.iter_mut() {
            seg.lapse_exponent = if seg.unit_lapse { 0.0 } else { seg.probe_lapse_exponent() };
            if seg.lapse_exponent <= -1.0 {
                return Err(Error::Validation(format!("lapse of {} is not integrable at its start", seg.label)));
            }
        }
        // Positivity on a sampled interior.
        for (i, seg) in segments.iter().enumerate() {
            let span = if seg.is_infinite() { 100.0 } else { seg.length };
            for k in 1..64 {
                let tau = span * k as f64 / 64.0;
                let l = seg.local(tau);
                if !(l.a.v > 0.0 && l.a.v.is_finite()) {
                    return Err(Error::Validation(format!(
                        "area not positive in segment {i} ({}) at t = {}: A = {}",
                        seg.label,
                        seg.start + tau,
                        l.a.v
                    )));
                }
                if !(l.w.v > 0.0 && l.w.v.is_finite()) {
                    return Err(Error::Validation(format!(
                        "lapse not positive in segment {i} ({}) at t = {}: w = {}",
                        seg.label,
                        seg.start + tau,
                        l.w.v
                    )));
                }
            }
        }
        // Joins: continuous area (C⁰) and continuous arclength derivative (C¹).
        let mut c1 = true;
        for i in 0..segments.len() - 1 {
            let left = segments[i].local(segments[i].length);
            let right = segments[i + 1].local(0.0);
            let (al, ar) = (left.a.v, right.a.v);
            if (al - ar).abs() > 1e-9 * al.abs().max(ar.abs()).max(1e-300) {
                return Err(Error::Validation(format!(
                    "area jumps at join {i}/{}: {al} vs {ar}",
                    i + 1
                )));
            }
            let (dl, dr) = (left.area_s().d1, right.area_s().d1);
            if (dl - dr).abs() > 1e-7 * dl.abs().max(dr.abs()).max(1.0) {
                c1 = false;
            }
        }
        let mut seg_s = Vec::with_capacity(segments.len());
        let mut acc = 0.0;
        for seg in segments.iter_mut() {
            seg_s.push(acc);
            seg.arclength = if seg.is_infinite() {
                f64::INFINITY
            } else {
                seg.arclength_to(seg.length)
            };
            if !(seg.arclength > 0.0) {
                return Err(Error::Validation(format!("segment {} has no arclength", seg.label)));
            }
            acc += seg.arclength;
        }
        let mut seg_flux = Vec::with_capacity(segments.len());
        for (i, seg) in segments.iter().enumerate() {
            let singular = seg.local(0.0).a.v <= 0.0;
            if seg.is_infinite() || (i == 0 && singular) {
                seg_flux.push(None);
            } else {
                seg_flux.push(Some(seg.flux_between(0.0, seg.length, tol.quad)?));
            }
        }
        Ok(Self {
            segments,
            seg_s,
            seg_flux,
            tail,
            origin,
            tol,
            c1,
        })
    }

    pub fn with_origin_exponent(mut self, exponent: f64, coefficient: Option<f64>) -> Self {
        self.origin = Some(OriginExponent { exponent, coefficient });
        self
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tol
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn tail(&self) -> Option<Tail> {
        self.tail
    }

    pub fn origin(&self) -> Option<OriginExponent> {
        self.origin
    }

    /// Joins are C¹ in arclength.
    pub fn is_c1(&self) -> bool {
        self.c1
    }

    /// Area at the inner boundary.
    pub fn inner_area(&self) -> f64 {
        self.segments[0].local(0.0).a.v
    }

    /// Arclength at the start of each segment.
    pub fn segment_starts(&self) -> &[f64] {
        &self.seg_s
    }

    /// Arclength at the end of the last finite segment (infinite if there is
    /// no tail the profile ends there).
    pub fn outer_arclength(&self) -> f64 {
        let last = self.segments.len() - 1;
        self.seg_s[last] + self.segments[last].arclength
    }

    pub fn point(&self, seg: usize, tau: f64) -> Point {
        Point { seg, tau }
    }

    /// Arclength of a point.
    pub fn arclength_of(&self, p: Point) -> f64 {
        self.seg_s[p.seg] + self.segments[p.seg].arclength_to(p.tau)
    }

    /// Locates arclength `s`; a join belongs to the segment that starts there.
    pub fn locate(&self, s: f64) -> Result<Point> {
        if !(s >= 0.0) {
            return Err(Error::Domain(format!("arclength {s} is negative")));
        }
        let outer = self.outer_arclength();
        if s > outer {
            return Err(Error::Domain(format!("arclength {s} beyond profile end {outer}")));
        }
        let mut seg = self.seg_s.partition_point(|&x| x <= s).saturating_sub(1);
        if s == outer && !self.segments[seg].is_infinite() {
            seg = self.segments.len() - 1;
            return Ok(Point {
                seg,
                tau: self.segments[seg].length,
            });
        }
        let sigma = s - self.seg_s[seg];
        Ok(Point {
            seg,
            tau: self.segments[seg].tau_at(sigma),
        })
    }

    pub fn local(&self, p: Point) -> Local {
        self.segments[p.seg].local(p.tau)
    }

    pub fn local_at(&self, s: f64) -> Result<Local> {
        Ok(self.local(self.locate(s)?))
    }

    /// Area and arclength derivatives at `s`.
    pub fn area_jet(&self, s: f64) -> Result<Jet> {
        Ok(self.local_at(s)?.area_s())
    }

    /// One-sided locals when `s` is a join, `None` otherwise.
    pub fn join_sides(&self, s: f64) -> Option<(Local, Local)> {
        let i = self.seg_s.iter().position(|&x| x == s)?;
        if i == 0 {
            return None;
        }
        let left = &self.segments[i - 1];
        Some((left.local(left.length), self.segments[i].local(0.0)))
    }

    /// `∫_p^∞ ds/A` in native coordinates.
    pub fn flux_to_infinity(&self, p: Point) -> Result<f64> {
        if self.tail.is_none() {
            return Err(Error::NoTail);
        }
        let seg = &self.segments[p.seg];
        let mut total = match &seg.flux_to_infinity {
            Some(f) => return Ok(f(p.tau)),
            None => seg.flux_between(p.tau, seg.length, self.tol.quad)?,
        };
        for j in p.seg + 1..self.segments.len() {
            total += match (&self.seg_flux[j], &self.segments[j].flux_to_infinity) {
                (Some(f), _) => *f,
                (None, Some(f)) => f(0.0),
                (None, None) => return Err(Error::NoTail),
            };
        }
        Ok(total)
    }

    /// Flux of the whole profile beyond the first segment.
    pub(crate) fn flux_after_first(&self) -> Result<f64> {
        if self.segments.len() == 1 {
            return Ok(0.0);
        }
        self.flux_to_infinity(Point { seg: 1, tau: 0.0 })
    }

    /// `∫_{p}^{q} ds/A` for `p ≤ q`.
    pub fn flux_between(&self, p: Point, q: Point) -> Result<f64> {
        if (p.seg, p.tau) >= (q.seg, q.tau) {
            return Ok(0.0);
        }
        if p.seg == q.seg {
            return self.segments[p.seg].flux_between(p.tau, q.tau, self.tol.quad);
        }
        let mut total = self.segments[p.seg].flux_between(p.tau, self.segments[p.seg].length, self.tol.quad)?;
        for j in p.seg + 1..q.seg {
            total += self.seg_flux[j].ok_or(Error::NoTail)?;
        }
        total += self.segments[q.seg].flux_between(0.0, q.tau, self.tol.quad)?;
        Ok(total)
    }

    /// Equivalent profile written in arclength (`w ≡ 1`).
    pub fn arclength_reparametrize(&self) -> Result<RadialProfile> {
        let mut out = Vec::with_capacity(self.segments.len());
        for (i, seg) in self.segments.iter().enumerate() {
            if seg.unit_lapse {
                out.push(seg.clone());
                continue;
            }
            let orig = Arc::new(seg.clone());
            let o = orig.clone();
            let area = move |sigma: f64| {
                let tau = o.tau_at(sigma);
                let l = o.local(tau);
                l.area_s()
            };
            let length = seg.arclength;
            let mut new = Segment::from_arcs(
                seg.label.clone(),
                self.seg_s[i],
                length,
                Arc::new(|_| Jet::constant(1.0)),
                Arc::new(area),
                true,
            );
            if let Some(f) = &seg.flux_to_infinity {
                let f = f.clone();
                let o = orig.clone();
                new = new.with_flux_to_infinity(Arc::new(move |sigma: f64| f(o.tau_at(sigma))));
            }
            out.push(new);
        }
        Self::from_parts(out, self.tail, self.origin, self.tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_is_identity_under_reparametrization() {
        let p = RadialProfile::isotropic(0.0, 0.0).unwrap();
        let q = p.arclength_reparametrize().unwrap();
        for s in [0.1, 1.0, 7.5] {
            assert_eq!(p.area_jet(s).unwrap(), q.area_jet(s).unwrap());
        }
    }

    #[test]
    fn schwarzschild_zas_has_four_thirds_exponent() {
        let p = RadialProfile::isotropic(-2.0, 1.0).unwrap().arclength_reparametrize().unwrap();
        let (s1, s2) = (1e-6, 1e-4);
        let slope = (p.area_jet(s2).unwrap().v / p.area_jet(s1).unwrap().v).ln() / (s2 / s1).ln();
        assert!((slope - 4.0 / 3.0).abs() < 1e-3, "{slope}");
    }

    #[test]
    fn reparametrized_area_matches_native() {
        let p = RadialProfile::isotropic(1.0, 0.25).unwrap();
        let q = p.arclength_reparametrize().unwrap();
        for s in [0.01, 0.3, 2.0, 40.0] {
            let a = p.area_jet(s).unwrap();
            let b = q.area_jet(s).unwrap();
            assert!((a.v - b.v).abs() <= 1e-10 * a.v, "{s}: {} {}", a.v, b.v);
            assert!((a.d1 - b.d1).abs() <= 1e-8 * a.d1.abs().max(1.0));
        }
    }

    #[test]
    fn arclength_inverse_roundtrip() {
        let seg = Segment::isotropic(-1.0, 0.5, 0.0);
        let p = RadialProfile::from_parts(vec![seg], Some(Tail { mass: -1.0, x_start: 0.5 }), None, Tolerances::default()).unwrap();
        for tau in [1e-9, 1e-5, 0.1, 3.0, 1e4] {
            let s = p.segments()[0].arclength_to(tau);
            let back = p.segments()[0].tau_at(s);
            assert!((back - tau).abs() <= 1e-11 * tau, "{tau} {back}");
        }
    }

    #[test]
    fn nonpositive_area_rejected() {
        let seg = Segment::arclength("bad", 0.0, 1.0, |t| Jet::variable(t) - 0.5);
        assert!(matches!(RadialProfile::new(vec![seg], None), Err(Error::Validation(_))));
    }

    #[test]
    fn area_jump_rejected() {
        let a = Segment::arclength("a", 0.0, 1.0, |_| Jet::constant(1.0));
        let b = Segment::arclength("b", 1.0, 1.0, |_| Jet::constant(2.0));
        assert!(matches!(RadialProfile::new(vec![a, b], None), Err(Error::Validation(_))));
    }
}
