//! Quantities of a single coordinate sphere `S_ρ`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::profile::{Local, RadialProfile};

/// Geometry of the sphere at arclength `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceReport {
    pub rho: f64,
    pub area: f64,
    pub mean_curvature: f64,
    pub hawking_mass: f64,
    pub slice_capacity: f64,
    pub slice_reg_mass: f64,
}

/// `√(A/16π)(1 − H²A/16π)`.
pub fn hawking_from(area: f64, h: f64) -> f64 {
    let k = area / (16.0 * PI);
    k.sqrt() * (1.0 - h * h * k)
}

/// `−(1/4π^{3/2})·(A^{−1/4}/I)²` with `I = ∫_ρ^∞ ds/A`.
pub fn reg_mass_from(area: f64, flux: f64) -> f64 {
    let r = area.powf(-0.25) / flux;
    -r * r / (4.0 * PI.powf(1.5))
}

pub fn mean_curvature(p: &RadialProfile, rho: f64) -> Result<f64> {
    let a = p.area_jet(rho)?;
    Ok(a.d1 / a.v)
}

pub fn hawking_mass(p: &RadialProfile, rho: f64) -> Result<f64> {
    let a = p.area_jet(rho)?;
    Ok(hawking_from(a.v, a.d1 / a.v))
}

/// `φ_ρ(r) = ∫_ρ^r ds/A ÷ ∫_ρ^∞ ds/A`.
pub fn harmonic_potential(p: &RadialProfile, rho: f64, r: f64) -> Result<f64> {
    if !(rho > 0.0 && rho <= r) {
        return Err(Error::Domain(format!("harmonic potential needs 0 < rho <= r, got {rho}, {r}")));
    }
    if r == rho {
        return Ok(0.0);
    }
    if r.is_infinite() {
        return Ok(1.0);
    }
    let (a, b) = (p.locate(rho)?, p.locate(r)?);
    Ok(p.flux_between(a, b)? / p.flux_to_infinity(a)?)
}

pub fn capacity_of_slice(p: &RadialProfile, rho: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("slice capacity needs rho > 0, got {rho}")));
    }
    Ok(1.0 / p.flux_to_infinity(p.locate(rho)?)?)
}

pub fn reg_mass_of_slice(p: &RadialProfile, rho: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("slice regular mass needs rho > 0, got {rho}")));
    }
    let pt = p.locate(rho)?;
    Ok(reg_mass_from(p.local(pt).a.v, p.flux_to_infinity(pt)?))
}

fn curvature_of(l: &Local) -> f64 {
    let a = l.area_s();
    let phi = (a.v / (4.0 * PI)).sqrt();
    let phi_s = a.d1 / (8.0 * PI * phi);
    let phi_ss = (a.d2 / (8.0 * PI) - phi_s * phi_s) / phi;
    2.0 * (1.0 - phi_s * phi_s) / (phi * phi) - 4.0 * phi_ss / phi
}

/// Scalar curvature of the warped product at `rho`.
pub fn scalar_curvature(p: &RadialProfile, rho: f64) -> Result<f64> {
    if let Some((left, right)) = p.join_sides(rho) {
        let (l, r) = (curvature_of(&left), curvature_of(&right));
        if (l - r).abs() > 1e-8 * l.abs().max(r.abs()).max(1.0) {
            return Err(Error::NotTwiceDifferentiable {
                at: rho,
                left: l,
                right: r,
            });
        }
        return Ok(0.5 * (l + r));
    }
    Ok(curvature_of(&p.local_at(rho)?))
}

pub fn slice_report(p: &RadialProfile, rho: f64) -> Result<SliceReport> {
    let pt = p.locate(rho)?;
    let a = p.local(pt).area_s();
    let flux = p.flux_to_infinity(pt)?;
    Ok(SliceReport {
        rho,
        area: a.v,
        mean_curvature: a.d1 / a.v,
        hawking_mass: hawking_from(a.v, a.d1 / a.v),
        slice_capacity: 1.0 / flux,
        slice_reg_mass: reg_mass_from(a.v, flux),
    })
}
