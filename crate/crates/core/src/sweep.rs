//! Parameter sweeps behind the tables and plots.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::conformal::min_boundary_conformal_factor;
use crate::error::{Error, Result};
use crate::geometry::{check_zas_inequality, classify_zas, slice_report, CapacitySign, ExtendedMass, SliceReport};
use crate::models::{build, cylinder_background, CylinderReference, ModelSpec, PowerTail};
use crate::numeric::ode::{integrate_system, OdeOptions};
use crate::numeric::roots::bisect;
use crate::parallel::{try_map, Execution};

pub const TABLE2_ALPHAS: [f64; 6] = [0.5, 1.0, 4.0 / 3.0, 1.5, 2.0, 3.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table2Row {
    pub alpha: f64,
    pub capacity_sign: CapacitySign,
    pub capacity: f64,
    pub mass: ExtendedMass,
    pub regular: bool,
    pub harmonically_regular: bool,
    pub removable: bool,
}

pub fn table2_row(alpha: f64) -> Result<Table2Row> {
    let spec = ModelSpec::PowerLawZas {
        alpha,
        tail: PowerTail::Blend,
    };
    let r = classify_zas(&build(&spec)?.profile)?;
    Ok(Table2Row {
        alpha,
        capacity_sign: r.capacity_sign,
        capacity: r.capacity,
        mass: r.mass,
        regular: r.regular,
        harmonically_regular: r.harmonically_regular,
        removable: r.removable,
    })
}

/// Rows for `alphas`; a failing row is named in the error.
pub fn table2(alphas: &[f64], exec: Execution) -> Result<Vec<Table2Row>> {
    try_map(alphas, exec, |&a| {
        table2_row(a).map_err(|e| Error::Domain(format!("table row alpha = {a}: {e}")))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderRow {
    pub length: f64,
    pub adm: f64,
    pub zas_mass: ExtendedMass,
    pub holds: bool,
    pub equality: bool,
}

pub fn cylinder_row(mbar: f64, length: f64) -> Result<CylinderRow> {
    let m = build(&ModelSpec::SchwarzschildWithCylinder { mbar, length })?;
    let r = check_zas_inequality(&m.profile)?;
    Ok(CylinderRow {
        length,
        adm: r.adm,
        zas_mass: r.zas_mass,
        holds: r.holds,
        equality: r.equality,
    })
}

/// `steps` evenly spaced lengths on `[0, l_max]`.
pub fn cylinder_sweep(mbar: f64, l_max: f64, steps: usize, exec: Execution) -> Result<Vec<CylinderRow>> {
    if steps < 2 {
        return Err(Error::InvalidSpec(format!("sweep needs at least 2 steps, got {steps}")));
    }
    if !(l_max > 0.0) {
        return Err(Error::InvalidSpec(format!("sweep needs L_max > 0, got {l_max}")));
    }
    let lengths: Vec<f64> = (0..steps).map(|i| l_max * i as f64 / (steps - 1) as f64).collect();
    try_map(&lengths, exec, |&l| cylinder_row(mbar, l))
}

/// Recovers `a`, `b` and the ZAS mass of the cylinder model by shooting the
/// background-harmonic `u` with `u(0) = 0`, `u'(0) = 1` out to a large radius
/// and normalizing `u → 1` at infinity.
pub fn cylinder_shooting(mbar: f64, length: f64) -> Result<CylinderReference> {
    let bg = cylinder_background(mbar, length)?;
    let opts = OdeOptions {
        rtol: 1e-12,
        atol: 1e-15,
        ..OdeOptions::default()
    };
    let segs = bg.segments();
    // State (u, du/dτ) in each segment's native coordinate.
    let mut u = 0.0;
    let mut du_ds = 1.0;
    let mut horizon_u = 0.0;
    let far = 1e4 * mbar;
    let mut end = None;
    for (i, seg) in segs.iter().enumerate() {
        let w0 = seg.local(0.0).w.v;
        let t1 = if seg.is_infinite() { far } else { seg.length };
        let rhs = |t: f64, y: &[f64; 2]| {
            let l = seg.local(t);
            let p = l.a.d1 / l.a.v - l.w.d1 / l.w.v;
            [y[1], -p * y[1]]
        };
        let y = integrate_system(rhs, 0.0, [u, du_ds * w0], t1, &opts, |_, _| {})?;
        let l = seg.local(t1);
        u = y[0];
        du_ds = y[1] / l.w.v;
        if i + 2 == segs.len() {
            horizon_u = u;
        }
        if seg.is_infinite() {
            end = Some((i, t1, l.a.v));
        }
    }
    let (seg, tau, area) = end.ok_or(Error::NoTail)?;
    let u_inf = u + du_ds * area * bg.flux_to_infinity(bg.point(seg, tau))?;
    let a = horizon_u / u_inf;
    Ok(CylinderReference {
        a,
        b: mbar - 8.0 * mbar * mbar / u_inf,
        zas_mass: -16.0 * mbar.powi(3) / (u_inf * u_inf),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleRow {
    pub eps: f64,
    pub ratio: f64,
    pub vanishes: bool,
    pub first_zero: Option<f64>,
    pub flux_available: f64,
    pub flux_to_zero: f64,
}

pub fn counterexample_row(eps: f64) -> Result<CounterexampleRow> {
    let p = build(&ModelSpec::SinBump { eps })?.profile;
    let r = min_boundary_conformal_factor(&p, Some(2.0 * PI))?;
    Ok(CounterexampleRow {
        eps,
        ratio: r.ratio,
        vanishes: r.first_zero.is_some(),
        first_zero: r.first_zero,
        flux_available: r.flux_available,
        flux_to_zero: r.flux_to_zero,
    })
}

pub fn counterexample(eps: &[f64], exec: Execution) -> Result<Vec<CounterexampleRow>> {
    try_map(eps, exec, |&e| counterexample_row(e))
}

/// `√(1 + π²/4) − 1`, below which the factor vanishes on `[0, 2π]`.
pub fn counterexample_threshold() -> f64 {
    (1.0 + PI * PI / 4.0).sqrt() - 1.0
}

/// Locates the `ε` in `[lo, hi]` where vanishing switches off.
pub fn counterexample_flip(lo: f64, hi: f64, xtol: f64) -> Result<f64> {
    let margin = |e: f64| counterexample_row(e).map(|r| r.flux_available - r.flux_to_zero).unwrap_or(f64::NAN);
    bisect(margin, lo, hi, xtol)
}

/// Slice quantities at each `rho`.
pub fn slice_table(spec: &ModelSpec, rhos: &[f64], exec: Execution) -> Result<Vec<SliceReport>> {
    let p = build(spec)?.profile;
    try_map(rhos, exec, |&r| slice_report(&p, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shooting_matches_closed_forms() {
        for (mbar, l) in [(1.0, 0.0), (1.0, 4.0), (2.0, 1.0)] {
            let s = cylinder_shooting(mbar, l).unwrap();
            let c = crate::models::cylinder_reference(mbar, l).unwrap();
            assert!((s.a - c.a).abs() < 1e-8, "{s:?} {c:?}");
            assert!((s.b - c.b).abs() < 1e-8 * mbar, "{s:?} {c:?}");
            assert!((s.zas_mass - c.zas_mass).abs() < 1e-8 * c.zas_mass.abs(), "{s:?} {c:?}");
        }
    }

    #[test]
    fn flip_is_near_threshold() {
        let e = counterexample_flip(0.5, 1.2, 1e-6).unwrap();
        assert!((e - counterexample_threshold()).abs() < 1e-4, "{e}");
    }

    #[test]
    fn sweep_rejects_single_step() {
        assert!(cylinder_sweep(1.0, 10.0, 1, Execution::Sequential).is_err());
    }
}
