//! Conformal changes `g₂ = u⁴g₁` of radial metrics, harmonic resolutions and
//! the minimal-boundary harmonic factor.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::profile::{JetFn, Local, Point, RadialProfile, Segment, Tail};
use crate::numeric::ode::{integrate_system, OdeOptions};
use crate::numeric::quadrature::adaptive;
use crate::numeric::regression::linear_fit;
use crate::numeric::roots::bisect;
use crate::numeric::{limit_at_zero, Jet, LimitConfig};

/// Factor on the isotropic tail: `u = (1 + m₂/2x)/(1 + m₁/2x)`, where `m₁` is
/// the background tail mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFactor {
    pub mass: f64,
}

/// A radial conformal factor given segment by segment in the background's
/// local coordinates.
#[derive(Clone)]
pub struct ConformalFactor {
    pub pieces: Vec<JetFn>,
    pub tail: Option<TailFactor>,
}

impl std::fmt::Debug for ConformalFactor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ConformalFactor")
            .field("pieces", &self.pieces.len())
            .field("tail", &self.tail)
            .finish()
    }
}

impl ConformalFactor {
    /// `u ≡ 1` on `background`.
    pub fn identity(background: &RadialProfile) -> Self {
        Self {
            pieces: (0..background.segments().len()).map(|_| Arc::new(|_: f64| Jet::constant(1.0)) as JetFn).collect(),
            tail: background.tail().map(|t| TailFactor { mass: t.mass }),
        }
    }
}

/// A background metric together with a conformal factor.
#[derive(Clone, Debug)]
pub struct ConformalPair {
    pub background: RadialProfile,
    pub factor: ConformalFactor,
}

fn tail_factor_jet(m1: f64, m2: f64, x_start: f64) -> JetFn {
    Arc::new(move |tau: f64| {
        let x = Jet::variable(tau) + x_start;
        let num = Jet::constant(1.0) + (x.recip() * (0.5 * m2));
        let den = Jet::constant(1.0) + (x.recip() * (0.5 * m1));
        num / den
    })
}

impl ConformalPair {
    /// Pairs a background with factor pieces for its finite segments; the
    /// tail piece is derived from `factor.tail` when declared.
    pub fn new(background: RadialProfile, mut factor: ConformalFactor) -> Result<Self> {
        let n = background.segments().len();
        if let (Some(tf), Some(t)) = (factor.tail, background.tail()) {
            if factor.pieces.len() == n - 1 {
                factor.pieces.push(tail_factor_jet(t.mass, tf.mass, t.x_start));
            }
        }
        if factor.pieces.len() != n {
            return Err(Error::InvalidSpec(format!(
                "conformal factor has {} pieces for {} segments",
                factor.pieces.len(),
                n
            )));
        }
        Ok(Self { background, factor })
    }

    pub fn u(&self, p: Point) -> Jet {
        (self.factor.pieces[p.seg])(p.tau)
    }

    /// Local data of the composed metric `u⁴g₁`.
    pub fn composed_local(&self, p: Point) -> Local {
        let l = self.background.local(p);
        let u = self.u(p);
        let u2 = u * u;
        Local {
            w: l.w * u2,
            a: l.a * u2 * u2,
        }
    }
}

/// The profile of `u⁴·g₁`.
pub fn compose(cp: &ConformalPair) -> Result<RadialProfile> {
    let bg = &cp.background;
    let segs = bg.segments();
    let starts = bg.segment_starts();
    let mut out = Vec::with_capacity(segs.len());
    let mut tail = None;
    for (i, seg) in segs.iter().enumerate() {
        // Positivity of u strictly inside.
        let span = if seg.is_infinite() { 100.0 } else { seg.length };
        for k in 1..=64 {
            let tau = span * k as f64 / 64.0;
            if k == 64 && seg.is_infinite() {
                break;
            }
            if !(cp.u(Point { seg: i, tau }).v > 0.0) {
                return Err(Error::FactorVanishesInterior {
                    at: starts[i] + seg.arclength_to(tau),
                });
            }
        }
        if i > 0 && !(cp.u(Point { seg: i, tau: 0.0 }).v > 0.0) {
            return Err(Error::FactorVanishesInterior { at: starts[i] });
        }
        if seg.is_infinite() {
            let t = bg.tail().ok_or(Error::NoTail)?;
            let m2 = match cp.factor.tail {
                Some(tf) => tf.mass,
                None => {
                    return Err(Error::InvalidSpec(
                        "composition needs the factor declared on the tail".into(),
                    ))
                }
            };
            tail = Some(Tail {
                mass: m2,
                x_start: t.x_start,
            });
            out.push(Segment::isotropic(m2, t.x_start, seg.start));
            continue;
        }
        let lapse = seg.lapse_fn();
        let area = seg.area_fn();
        let u = cp.factor.pieces[i].clone();
        let u2 = u.clone();
        out.push(Segment::new(
            seg.label.clone(),
            seg.start,
            seg.length,
            move |t| {
                let uu = u(t);
                lapse(t) * uu * uu
            },
            move |t| {
                let uu = u2(t);
                let q = uu * uu;
                area(t) * q * q
            },
        ));
    }
    let mut p = RadialProfile::from_parts(out, tail, None, bg.tolerances())?;
    let u0 = cp.u(Point { seg: 0, tau: 0.0 });
    if u0.v == 0.0 && bg.inner_area() > 0.0 && u0.d1 > 0.0 {
        p = p.with_origin_exponent(4.0 / 3.0, None);
    } else if u0.v > 0.0 {
        if let Some(o) = bg.origin() {
            p = p.with_origin_exponent(o.exponent, None);
        }
    }
    Ok(p)
}

/// `m₁ − m₂` for `u ≈ 1 + c/r` at infinity, i.e. `−2c`.
pub fn adm_mass_shift(cp: &ConformalPair) -> Result<f64> {
    let t = cp.background.tail().ok_or(Error::NoTail)?;
    if let Some(tf) = cp.factor.tail {
        return Ok(t.mass - tf.mass);
    }
    let last = cp.factor.pieces.len() - 1;
    let u = cp.factor.pieces[last].clone();
    let x0 = t.x_start;
    let cfg = LimitConfig {
        rho0: 1.0 / (x0 + 10.0),
        tol: 1e-8,
        max_samples: 30,
        ..LimitConfig::default()
    };
    let probe = limit_at_zero(|y| Ok((u(1.0 / y - x0).v - 1.0) / y), &cfg).map_err(|_| Error::NoExpansion)?;
    let c = probe.extrapolant.finite().ok_or(Error::NoExpansion)?;
    Ok(-2.0 * c)
}

/// `R₂ = u^{−5}(−8Δ₁u + R₁u)`.
pub fn conformal_scalar_curvature(u: f64, lap_u: f64, r1: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::Domain(format!("conformal factor {u} is not positive")));
    }
    Ok((-8.0 * lap_u + r1 * u) / u.powi(5))
}

/// `H₂ = u^{−2}H₁ + 4u^{−3}ν₁(u)`.
pub fn conformal_mean_curvature(u: f64, nu_u: f64, h1: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::Domain(format!("conformal factor {u} is not positive")));
    }
    Ok(h1 / (u * u) + 4.0 * nu_u / (u * u * u))
}

/// Offset `τ` with `∫_{τ0}^{τ} L = σ` (either sign of σ).
fn local_chart(lapse: &dyn Fn(f64) -> f64, tau0: f64, sigma: f64) -> f64 {
    let mut tau = tau0 + sigma / lapse(tau0);
    for _ in 0..50 {
        let f = adaptive(&|t| lapse(t), tau0, tau, 1e-14).unwrap_or(f64::NAN) - sigma;
        let step = f / lapse(tau);
        tau -= step;
        if step.abs() <= 1e-16 * tau.abs().max(1e-300) {
            break;
        }
    }
    tau
}

/// Radial Laplacian `ψ'' + (A'/A)ψ'` by central differences in arclength.
fn fd_laplacian(values: [f64; 3], h: f64, mean_curvature: f64) -> f64 {
    let [m, c, p] = values;
    (p - 2.0 * c + m) / (h * h) + mean_curvature * (p - m) / (2.0 * h)
}

/// `Δ₁(uφ) − u⁵Δ₂φ − φΔ₁u` at background arclength `r`, each Laplacian by
/// central differences of step `h` in its own metric's arclength.
pub fn conformal_laplacian_residual(
    cp: &ConformalPair,
    phi: &dyn Fn(Point) -> f64,
    r: f64,
    h: f64,
) -> Result<f64> {
    let bg = &cp.background;
    let pt = bg.locate(r)?;
    let seg = &bg.segments()[pt.seg];
    let piece = &cp.factor.pieces[pt.seg];
    let w1 = |t: f64| seg.local(t).w.v;
    let w2 = |t: f64| {
        let u = piece(t);
        (seg.local(t).w * u * u).v
    };
    let at = |lapse: &dyn Fn(f64) -> f64, sigma: f64| Point {
        seg: pt.seg,
        tau: if sigma == 0.0 { pt.tau } else { local_chart(lapse, pt.tau, sigma) },
    };
    let p1 = [at(&w1, -h), pt, at(&w1, h)];
    let p2 = [at(&w2, -h), pt, at(&w2, h)];
    let h1 = {
        let a = bg.local(pt).area_s();
        a.d1 / a.v
    };
    let h2 = {
        let a = cp.composed_local(pt).area_s();
        a.d1 / a.v
    };
    let u = |p: Point| cp.u(p).v;
    let lap1_uphi = fd_laplacian(p1.map(|p| u(p) * phi(p)), h, h1);
    let lap1_u = fd_laplacian(p1.map(u), h, h1);
    let lap2_phi = fd_laplacian(p2.map(phi), h, h2);
    let u0 = u(pt);
    Ok(lap1_uphi - u0.powi(5) * lap2_phi - phi(pt) * lap1_u)
}

/// Outcome of the harmonic-resolution ODE test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicTest {
    pub harmonically_regular: bool,
    pub log_slope: f64,
    /// Log-slope component along, and across, the inner-boundary values of
    /// the two basis solutions.
    pub kappa_parallel: f64,
    pub kappa_perpendicular: f64,
}

/// `Δ̄φ̄/φ̄` in native coordinates of the background's first segment.
fn resolution_potential(l: &Local, phi: Jet) -> f64 {
    let (w, a) = (l.w, l.a);
    let lap = (phi.d2 - (w.d1 / w.v) * phi.d1 + (a.d1 / a.v) * phi.d1) / (w.v * w.v);
    lap / phi.v
}

const FIT_LO: f64 = 1e-6;
const FIT_HI: f64 = 1e-3;

/// Integrates `ū'' + (Ā'/Ā)ū' − fū = 0`, `f = Δ̄φ̄/φ̄`, inward in the
/// background's arclength and decides whether a solution with `ū(0) > 0`
/// keeps a bounded slope.
pub fn harmonic_resolution_test(background: &RadialProfile, phibar: &JetFn) -> Result<HarmonicTest> {
    let seg = &background.segments()[0];
    let s_total = seg.arclength_len();
    let s1 = (0.5 * s_total).min(1.0);
    if !(s1 > FIT_HI) {
        return Err(Error::ResolutionInvalid("first segment too short for the fit window".into()));
    }
    // Precondition: φ̄ vanishes at the boundary, grows, and is positive inside.
    let tiny = seg.tau_at(1e-9 * s1);
    let edge = phibar(tiny);
    let local_edge = seg.local(tiny);
    if !(edge.v.abs() <= 1e-6 * phibar(seg.tau_at(s1)).v.abs()) {
        return Err(Error::ResolutionInvalid(format!("resolution function does not vanish at the boundary ({})", edge.v)));
    }
    if !(local_edge.to_arclength(edge).d1 > 0.0) {
        return Err(Error::ResolutionInvalid("normal derivative of the resolution function is not positive".into()));
    }
    for k in 1..=32 {
        let tau = seg.tau_at(s1 * k as f64 / 32.0);
        if !(phibar(tau).v > 0.0) {
            return Err(Error::ResolutionInvalid("resolution function is not positive inside".into()));
        }
    }
    let rhs = |_s: f64, y: &[f64; 3]| {
        let tau = y[0].max(0.0);
        let l = seg.local(tau);
        let f = resolution_potential(&l, phibar(tau));
        let mean = l.a.d1 / (l.a.v * l.w.v);
        [1.0 / l.w.v, y[2], -mean * y[2] + f * y[1]]
    };
    let opts = OdeOptions {
        rtol: background.tolerances().ode,
        ..OdeOptions::default()
    };
    let tau1 = seg.tau_at(s1);
    let stages: Vec<f64> = (0..=30).map(|k| FIT_HI * (FIT_LO / FIT_HI).powf(k as f64 / 30.0)).collect();
    let mut kappas = [0.0; 2];
    let mut inner = [0.0; 2];
    for (b, init) in [[1.0, 0.0], [0.0, 1.0]].into_iter().enumerate() {
        let mut y = integrate_system(rhs, s1, [tau1, init[0], init[1]], FIT_HI, &opts, |_, _| {})?;
        let mut xs = vec![FIT_HI.ln()];
        let mut ys = vec![y[2]];
        for w in stages.windows(2) {
            y = integrate_system(rhs, w[0], y, w[1], &opts, |_, _| {})?;
            xs.push(w[1].ln());
            ys.push(y[2]);
        }
        kappas[b] = linear_fit(&xs, &ys).0;
        inner[b] = y[1];
    }
    let norm2 = inner[0] * inner[0] + inner[1] * inner[1];
    let par = (kappas[0] * inner[0] + kappas[1] * inner[1]) / norm2;
    let perp = (kappas[0] * inner[1] - kappas[1] * inner[0]).abs() / norm2;
    let (regular, slope) = if par.abs() <= 1e-3 {
        (true, par)
    } else if par.abs() <= 1e3 * perp {
        // A combination with ū(0) = 1 and no logarithmic term exists.
        (true, 0.0)
    } else {
        (false, par)
    };
    Ok(HarmonicTest {
        harmonically_regular: regular,
        log_slope: slope,
        kappa_parallel: par,
        kappa_perpendicular: perp,
    })
}

/// The resolution `g = φ̄⁴ḡ` with `φ̄ = (A/4π)^{1/4}` and `ḡ` a round
/// cylinder of area 4π, restricted to the first segment.
pub fn canonical_resolution(p: &RadialProfile) -> Result<(RadialProfile, JetFn)> {
    let seg = &p.segments()[0];
    let length = if seg.is_infinite() { 1.0 } else { seg.length };
    let area = seg.area_fn();
    let lapse = seg.lapse_fn();
    let phi: JetFn = {
        let area = area.clone();
        Arc::new(move |t: f64| (area(t) / (4.0 * PI)).powf(0.25))
    };
    let phi2 = phi.clone();
    let bg_seg = Segment::new(
        format!("{} (resolved)", seg.label),
        seg.start,
        length,
        move |t| {
            let f = phi2(t);
            lapse(t) / (f * f)
        },
        |_| Jet::constant(4.0 * PI),
    );
    let bg = RadialProfile::from_parts(vec![bg_seg], None, None, p.tolerances())?;
    Ok((bg, phi))
}

/// Boundary data of the harmonic factor forced by a minimal inner boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinBoundary {
    /// `u'(0)/u(0) = −H₁/4`.
    pub ratio: f64,
    pub first_zero: Option<f64>,
    /// `∫_0^{r} ds/A` needed for `u` to vanish.
    pub flux_to_zero: f64,
    /// `∫_0^{end} ds/A` over the probe interval.
    pub flux_available: f64,
}

/// Harmonic `u = c₂ + c₁∫_0^r ds/A` whose conformal metric has a minimal
/// inner boundary; reports where `u` first vanishes in `[0, probe_end]`.
pub fn min_boundary_conformal_factor(p: &RadialProfile, probe_end: Option<f64>) -> Result<MinBoundary> {
    let start = p.point(0, 0.0);
    let a0 = p.local(start).area_s();
    if !(a0.v > 0.0) {
        return Err(Error::Domain("inner boundary has zero area".into()));
    }
    let h1 = a0.d1 / a0.v;
    if !(h1 > 0.0 && h1.is_finite()) {
        return Err(Error::Domain(format!("boundary mean curvature {h1} is not positive")));
    }
    let ratio = -h1 / 4.0;
    let needed = 4.0 / (h1 * a0.v);
    let end = match probe_end {
        Some(e) => e,
        None => p.outer_arclength(),
    };
    let flux_to = |s: f64| -> Result<f64> {
        if s.is_infinite() {
            return p.flux_to_infinity(start);
        }
        p.flux_between(start, p.locate(s)?)
    };
    let available = flux_to(end)?;
    let first_zero = if available > needed {
        let hi = if end.is_infinite() {
            let mut hi = 1.0;
            while flux_to(hi)? < needed {
                hi *= 2.0;
            }
            hi
        } else {
            end
        };
        Some(bisect(|s| flux_to(s).unwrap_or(f64::NAN) - needed, 0.0, hi, 1e-12)?)
    } else {
        None
    };
    Ok(MinBoundary {
        ratio,
        first_zero,
        flux_to_zero: needed,
        flux_available: available,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pointwise_formulas() {
        assert_eq!(conformal_scalar_curvature(1.0, 0.0, 5.0).unwrap(), 5.0);
        assert_eq!(conformal_scalar_curvature(2.0, 0.0, 0.0).unwrap(), 0.0);
        assert_eq!(conformal_scalar_curvature(1.0, -1.0, 0.0).unwrap(), 8.0);
        assert!(conformal_scalar_curvature(0.0, 0.0, 1.0).is_err());
        let m = 1.3;
        assert!(conformal_mean_curvature(2.0, -2.0 / m, 4.0 / m).unwrap().abs() < 1e-15);
        assert_eq!(conformal_mean_curvature(1.0, 0.0, 0.7).unwrap(), 0.7);
        assert!(conformal_mean_curvature(-1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn schwarzschild_from_flat() {
        let flat = RadialProfile::isotropic(0.0, 1.0).unwrap();
        let cp = ConformalPair::new(
            flat,
            ConformalFactor {
                pieces: vec![],
                tail: Some(TailFactor { mass: 1.0 }),
            },
        )
        .unwrap();
        assert_eq!(adm_mass_shift(&cp).unwrap(), -1.0);
        let g = compose(&cp).unwrap();
        assert_eq!(g.tail().unwrap().mass, 1.0);
    }

    #[test]
    fn fitted_shift_matches_declared() {
        let flat = RadialProfile::isotropic(0.0, 1.0).unwrap();
        let cp = ConformalPair::new(
            flat,
            ConformalFactor {
                pieces: vec![Arc::new(|t: f64| Jet::constant(1.0) + (Jet::variable(t) + 1.0).recip() * 0.5)],
                tail: None,
            },
        )
        .unwrap();
        assert!((adm_mass_shift(&cp).unwrap() + 1.0).abs() < 1e-8);
    }

    #[test]
    fn identity_factor_has_zero_residual() {
        let p = RadialProfile::isotropic(1.0, 0.25).unwrap();
        let cp = ConformalPair::new(p.clone(), ConformalFactor::identity(&p)).unwrap();
        let phi = |q: Point| (q.tau + 1.0).powi(3);
        assert_eq!(conformal_laplacian_residual(&cp, &phi, 2.0, 1e-2).unwrap(), 0.0);
    }
}
