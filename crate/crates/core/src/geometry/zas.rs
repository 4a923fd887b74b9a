//! Capacity, mass and classification of a zero area singularity at the
//! inner boundary.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::conformal::{canonical_resolution, harmonic_resolution_test};
use crate::error::{Error, Result};
use crate::geometry::mass::ExtendedMass;
use crate::geometry::profile::RadialProfile;
use crate::geometry::slice::reg_mass_from;
use crate::numeric::quadrature::{integrate, Quadrant, Upper};
use crate::numeric::regression::log_log_slope;
use crate::numeric::{limit_at_zero, Limit, LimitConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapacitySign {
    Zero,
    Positive,
}

impl std::fmt::Display for CapacitySign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CapacitySign::Zero => "zero",
            CapacitySign::Positive => "positive",
        })
    }
}

/// Exponent `p` of `A(s) ≈ c·s^p` and whether it was declared.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OriginPower {
    pub exponent: f64,
    pub declared: bool,
}

/// Classification of the inner boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZasReport {
    pub is_zas: bool,
    pub capacity: f64,
    pub capacity_sign: CapacitySign,
    pub mass: ExtendedMass,
    pub regular: bool,
    pub harmonically_regular: bool,
    pub removable: bool,
    pub origin_exponent: f64,
    pub exponent_declared: bool,
    pub leading_coefficient: Option<f64>,
    pub log_slope: Option<f64>,
}

pub fn is_zas(p: &RadialProfile) -> bool {
    p.inner_area() <= 0.0
}

fn require_zas(p: &RadialProfile) -> Result<()> {
    if is_zas(p) {
        Ok(())
    } else {
        Err(Error::NotZas)
    }
}

/// Sampling start inside the first segment.
fn probe_scale(p: &RadialProfile) -> f64 {
    p.segments()[0].arclength_len().min(1.0)
}

fn limit_config(p: &RadialProfile) -> LimitConfig {
    LimitConfig::default()
        .with_rho0(0.5 * probe_scale(p))
        .with_tol(p.tolerances().limit)
}

/// Declared origin exponent, or a log-log regression over `[δ/100, δ]`.
pub fn origin_power(p: &RadialProfile) -> Result<OriginPower> {
    require_zas(p)?;
    if let Some(o) = p.origin() {
        return Ok(OriginPower {
            exponent: o.exponent,
            declared: true,
        });
    }
    let delta = 1e-4 * probe_scale(p);
    let slope = log_log_slope(|s| p.area_jet(s).map(|a| a.v).unwrap_or(f64::NAN), delta / 100.0, delta, 9)
        .ok_or_else(|| Error::Domain("area does not follow a power law at the origin".into()))?;
    Ok(OriginPower {
        exponent: slope,
        declared: false,
    })
}

/// `C(Σ) = (∫_0^∞ ds/A)^{−1}`, zero when the integral diverges.
pub fn capacity_of_zas(p: &RadialProfile) -> Result<(f64, CapacitySign)> {
    let power = origin_power(p)?;
    if !power.declared && (power.exponent - 1.0).abs() <= 0.01 {
        return Err(Error::AmbiguousExponent { slope: -power.exponent });
    }
    if power.exponent >= 1.0 {
        return Ok((0.0, CapacitySign::Zero));
    }
    let seg = &p.segments()[0];
    let g = |t: f64| {
        let l = seg.local(t);
        l.w.v / l.a.v
    };
    let beta = if seg.has_unit_lapse() {
        -power.exponent
    } else {
        let len = if seg.is_infinite() { 1.0 } else { seg.length.min(1.0) };
        log_log_slope(g, 1e-6 * len, 1e-4 * len, 9).ok_or_else(|| Error::Domain("flux integrand vanishes".into()))?
    };
    let head = if seg.is_infinite() {
        let q = Quadrant::new(&g, 0.0, Upper::Finite(1.0))?.with_lower_exponent(beta)?;
        integrate(&q, p.tolerances().quad)? + seg.flux_to_infinity_fn().map(|f| f(1.0)).ok_or(Error::NoTail)?
    } else {
        let q = Quadrant::new(&g, 0.0, Upper::Finite(seg.length))?.with_lower_exponent(beta)?;
        integrate(&q, p.tolerances().quad)?
    };
    let total = if seg.is_infinite() { head } else { head + p.flux_after_first()? };
    Ok((1.0 / total, CapacitySign::Positive))
}

fn lhopital_integrand(p: &RadialProfile, rho: f64) -> Result<f64> {
    let a = p.area_jet(rho)?;
    let k = a.v.powf(-0.25) * a.d1;
    Ok(-k * k / (64.0 * PI.powf(1.5)))
}

fn h43_integrand(p: &RadialProfile, rho: f64) -> Result<f64> {
    let a = p.area_jet(rho)?;
    let h = (a.d1 / a.v).abs();
    Ok(-(h.powf(4.0 / 3.0) * a.v / (16.0 * PI)).powf(1.5))
}

fn slice_reg_mass(p: &RadialProfile, rho: f64) -> Result<f64> {
    let pt = p.locate(rho)?;
    Ok(reg_mass_from(p.local(pt).a.v, p.flux_to_infinity(pt)?))
}

fn routes_agree(a: Limit, b: Limit, tol: f64) -> bool {
    match (a, b) {
        (Limit::NegInfinity, Limit::NegInfinity) => true,
        (Limit::Finite(x), Limit::Finite(y)) => (x - y).abs() <= 1e-5 * x.abs().max(y.abs()) + tol,
        _ => false,
    }
}

/// Both evaluation routes of the ZAS mass, before comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassRoutes {
    pub flux: Limit,
    pub derivative: Limit,
}

pub fn zas_mass_routes(p: &RadialProfile) -> Result<MassRoutes> {
    require_zas(p)?;
    let cfg = limit_config(p);
    let flux = limit_at_zero(|r| slice_reg_mass(p, r), &cfg)?.extrapolant;
    let derivative = limit_at_zero(|r| lhopital_integrand(p, r), &cfg)?.extrapolant;
    Ok(MassRoutes { flux, derivative })
}

/// ZAS mass over concentric spheres; `−∞` whenever the capacity is positive.
pub fn zas_mass(p: &RadialProfile) -> Result<ExtendedMass> {
    require_zas(p)?;
    let (_, sign) = capacity_of_zas(p)?;
    if sign == CapacitySign::Positive {
        return Ok(ExtendedMass::NegInfinity);
    }
    // A declared exponent fixes the leading term H^{4/3}A ≈ c·p^{4/3}·s^{p−4/3},
    // which decides the limit away from 4/3. Sampling cannot: near 4/3 the
    // divergence is too slow to reach any threshold above underflow.
    let power = origin_power(p)?;
    if power.declared && (power.exponent - 4.0 / 3.0).abs() > 1e-6 {
        return Ok(if power.exponent < 4.0 / 3.0 {
            ExtendedMass::NegInfinity
        } else {
            ExtendedMass::Finite(0.0)
        });
    }
    let tol = p.tolerances().limit;
    let routes = zas_mass_routes(p)?;
    if !routes_agree(routes.flux, routes.derivative, tol) {
        let v = |l: Limit| l.finite().unwrap_or(f64::NEG_INFINITY);
        return Err(Error::RouteMismatch {
            first: v(routes.flux),
            second: v(routes.derivative),
        });
    }
    ExtendedMass::from_limit(routes.derivative, tol)
}

/// `−lim (H^{4/3}A/16π)^{3/2}` over concentric spheres.
pub fn h43_mass_limit(p: &RadialProfile) -> Result<ExtendedMass> {
    require_zas(p)?;
    let l = limit_at_zero(|r| h43_integrand(p, r), &limit_config(p))?.extrapolant;
    ExtendedMass::from_limit(l, p.tolerances().limit)
}

/// Leading coefficient `lim A(s)/s^p`.
pub fn leading_coefficient(p: &RadialProfile, exponent: f64) -> Result<f64> {
    if let Some(c) = p.origin().and_then(|o| o.coefficient) {
        return Ok(c);
    }
    let l = limit_at_zero(|s| Ok(p.area_jet(s)?.v / s.powf(exponent)), &limit_config(p))?.extrapolant;
    l.finite().ok_or_else(|| Error::Domain("area coefficient diverges".into()))
}

pub fn classify_zas(p: &RadialProfile) -> Result<ZasReport> {
    require_zas(p)?;
    let power = origin_power(p)?;
    let (capacity, capacity_sign) = capacity_of_zas(p)?;
    let mass = zas_mass(p)?;
    let ptol = if power.declared { 1e-6 } else { 1e-3 };
    let regular = (power.exponent - 4.0 / 3.0).abs() <= ptol;
    let mut leading = None;
    let mut removable = false;
    if (power.exponent - 2.0).abs() <= ptol {
        let c = leading_coefficient(p, 2.0)?;
        leading = Some(c);
        removable = (c - 4.0 * PI).abs() <= 1e-6 * 4.0 * PI;
    }
    let (harmonically_regular, log_slope) = if regular {
        let (bg, phibar) = canonical_resolution(p)?;
        let t = harmonic_resolution_test(&bg, &phibar)?;
        (t.harmonically_regular, Some(t.log_slope))
    } else {
        (false, None)
    };
    Ok(ZasReport {
        is_zas: true,
        capacity,
        capacity_sign,
        mass,
        regular,
        harmonically_regular,
        removable,
        origin_exponent: power.exponent,
        exponent_declared: power.declared,
        leading_coefficient: leading,
        log_slope,
    })
}
