//! Named invariant checks grouped by module, each reporting its measured
//! residual against a gate.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::conformal::{
    adm_mass_shift, compose, conformal_laplacian_residual, conformal_mean_curvature, conformal_scalar_curvature,
    harmonic_resolution_test, ConformalFactor, ConformalPair, TailFactor,
};
use crate::error::{Error, Result};
use crate::geometry::profile::{JetFn, Point, RadialProfile, Segment, Tail, Tolerances};
use crate::geometry::*;
use crate::models::{self, build, cylinder_background, cylinder_reference, ModelSpec, PowerTail};
use crate::numeric::ode::{solve_radial_ode, Direction, OdeOptions};
use crate::numeric::quadrature::{integrate, Quadrant, Upper};
use crate::numeric::{classify_divergence, limit_at_zero, Divergence, Jet, LimitConfig};
use crate::parallel::{map, Execution};
use crate::sweep::{counterexample_flip, counterexample_threshold, cylinder_shooting, table2_row, TABLE2_ALPHAS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    All,
    NumericKernel,
    RadialGeometry,
    ConformalToolkit,
    ModelLibrary,
}

impl Scope {
    fn includes(self, s: Scope) -> bool {
        self == Scope::All || self == s
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scope::All => "all",
            Scope::NumericKernel => "numeric_kernel",
            Scope::RadialGeometry => "radial_geometry",
            Scope::ConformalToolkit => "conformal_toolkit",
            Scope::ModelLibrary => "model_library",
        })
    }
}

impl FromStr for Scope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.replace('-', "_").as_str() {
            "all" => Scope::All,
            "numeric_kernel" => Scope::NumericKernel,
            "radial_geometry" => Scope::RadialGeometry,
            "conformal_toolkit" => Scope::ConformalToolkit,
            "model_library" => Scope::ModelLibrary,
            _ => return Err(Error::InvalidSpec(format!("unknown verify scope {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: Scope,
    pub name: String,
    #[serde(with = "crate::serde_ext")]
    pub residual: f64,
    pub gate: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub scope: Scope,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub gate_scale: f64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub tol: Tolerances,
    pub seed: u64,
    pub exec: Execution,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            tol: Tolerances::default(),
            seed: 0x5eed,
            exec: Execution::default(),
        }
    }
}

type Probe = Box<dyn Fn(&VerifyConfig) -> Result<f64> + Send + Sync>;

struct Spec {
    suite: Scope,
    name: &'static str,
    base_gate: f64,
    probe: Probe,
}

fn spec(suite: Scope, name: &'static str, base_gate: f64, f: impl Fn(&VerifyConfig) -> Result<f64> + Send + Sync + 'static) -> Spec {
    Spec {
        suite,
        name,
        base_gate,
        probe: Box::new(f),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn profile(spec: &ModelSpec, cfg: &VerifyConfig) -> Result<RadialProfile> {
    Ok(build(spec)?.profile.with_tolerances(cfg.tol))
}

fn power(alpha: f64, cfg: &VerifyConfig) -> Result<RadialProfile> {
    profile(
        &ModelSpec::PowerLawZas {
            alpha,
            tail: PowerTail::Blend,
        },
        cfg,
    )
}

fn count(flags: impl IntoIterator<Item = bool>) -> f64 {
    flags.into_iter().filter(|&b| b).count() as f64
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

/// Power-law table cells as (capacity zero, mass, regular, harmonically regular, removable).
pub fn table2_expected(alpha: f64) -> (CapacitySign, ExtendedMass, bool, bool, bool) {
    use CapacitySign::*;
    use ExtendedMass::*;
    if alpha < 1.0 {
        (Positive, NegInfinity, false, false, false)
    } else if alpha < 4.0 / 3.0 {
        (Zero, NegInfinity, false, false, false)
    } else if alpha == 4.0 / 3.0 {
        (Zero, Finite(-2.0 / 9.0), true, true, false)
    } else {
        (Zero, Finite(0.0), false, false, alpha == 2.0)
    }
}

fn numeric_suite() -> Vec<Spec> {
    use Scope::NumericKernel as S;
    vec![
        spec(S, "quadrature_inverse_square", 1e-9, |c| {
            let f = |r: f64| 1.0 / (4.0 * PI * r * r);
            let q = Quadrant::new(&f, 1.0, Upper::Infinity)?;
            Ok(rel(integrate(&q, c.tol.quad)?, 1.0 / (4.0 * PI)))
        }),
        spec(S, "quadrature_sqrt_singularity", 1e-9, |c| {
            let f = |r: f64| 1.0 / (4.0 * PI * r.sqrt());
            let q = Quadrant::new(&f, 0.0, Upper::Finite(1.0))?.with_lower_exponent(-0.5)?;
            Ok(rel(integrate(&q, c.tol.quad)?, 1.0 / (2.0 * PI)))
        }),
        spec(S, "divergence_classification_mismatches", 0.0, |_| {
            let cases: [(f64, Divergence); 3] =
                [(-0.5, Divergence::Convergent), (-1.0, Divergence::Divergent), (-2.0, Divergence::Divergent)];
            let mut bad = 0.0;
            for (p, want) in cases {
                let f = move |r: f64| r.powf(p) / (4.0 * PI);
                let q = Quadrant::new(&f, 0.0, Upper::Finite(1.0))?.with_lower_exponent(p)?;
                if classify_divergence(&q)? != want {
                    bad += 1.0;
                }
            }
            Ok(bad)
        }),
        spec(S, "limit_linear_through_origin", 1e-6, |c| {
            let l = limit_at_zero(|r| Ok(-2.0 * r), &LimitConfig::default().with_tol(c.tol.limit))?;
            Ok(l.extrapolant.finite().map(f64::abs).unwrap_or(f64::INFINITY))
        }),
        spec(S, "limit_four_thirds_regular_mass", 1e-5, |c| {
            let p = power(4.0 / 3.0, c)?;
            let cfg = LimitConfig::default().with_rho0(0.5).with_tol(c.tol.limit);
            let l = limit_at_zero(|r| reg_mass_of_slice(&p, r), &cfg)?;
            Ok(rel(l.extrapolant.finite().unwrap_or(f64::NEG_INFINITY), -2.0 / 9.0) * 4.5)
        }),
        spec(S, "ode_flat_harmonic", 1e-8, |c| {
            let opts = OdeOptions {
                rtol: c.tol.ode,
                ..OdeOptions::default()
            };
            let sol = solve_radial_ode(|r| 2.0 / r, |_| 0.0, 1.0, 0.0, 1.0, Direction::Outward { r_max: 50.0 }, &opts)?;
            Ok(max_of(sol.samples.iter().map(|&(r, u, _)| (u - (1.0 - 1.0 / r)).abs())))
        }),
        spec(S, "ode_linear_branch_inward", 1e-8, |c| {
            let opts = OdeOptions {
                rtol: c.tol.ode,
                ..OdeOptions::default()
            };
            let sol = solve_radial_ode(|_| 1.0, |r| -1.0 / r, 1.0, 1.0, 1.0, Direction::Inward, &opts)?;
            Ok((sol.end_value - sol.end_r).abs() + (sol.end_slope - 1.0).abs())
        }),
    ]
}

fn geometry_suite() -> Vec<Spec> {
    use Scope::RadialGeometry as S;
    vec![
        spec(S, "flat_capacity_closed_form", 1e-8, |c| {
            let p = profile(&ModelSpec::Flat, c)?;
            let errs: Result<Vec<f64>> = [0.1, 0.25, 1.0, 4.0]
                .iter()
                .map(|&r| Ok((capacity_of_slice(&p, r)? - 4.0 * PI * r).abs() / (4.0 * PI * r)))
                .collect();
            Ok(max_of(errs?))
        }),
        spec(S, "flat_regular_mass_closed_form", 1e-8, |c| {
            let p = profile(&ModelSpec::Flat, c)?;
            let errs: Result<Vec<f64>> = [0.1, 0.5, 2.0]
                .iter()
                .map(|&r| Ok((reg_mass_of_slice(&p, r)? + 2.0 * r).abs() / (2.0 * r)))
                .collect();
            Ok(max_of(errs?))
        }),
        spec(S, "capacity_monotonicity_violations", 0.0, |c| {
            let specs = [
                ModelSpec::Flat,
                ModelSpec::Schwarzschild { m: 1.0 },
                ModelSpec::PowerLawZas {
                    alpha: 0.5,
                    tail: PowerTail::Blend,
                },
                ModelSpec::PowerLawZas {
                    alpha: 3.0,
                    tail: PowerTail::Blend,
                },
                ModelSpec::SinBump { eps: 0.3 },
            ];
            let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
            let mut bad = 0.0;
            for s in &specs {
                let p = profile(s, c)?;
                for _ in 0..100 {
                    let (x, y): (f64, f64) = (rng.gen_range(0.01..10.0), rng.gen_range(0.01..10.0));
                    if x == y {
                        continue;
                    }
                    let (lo, hi) = (x.min(y), x.max(y));
                    if capacity_of_slice(&p, lo)? >= capacity_of_slice(&p, hi)? {
                        bad += 1.0;
                    }
                }
            }
            Ok(bad)
        }),
        spec(S, "schwarzschild_hawking_mass", 1e-9, |c| {
            let p = profile(&ModelSpec::Schwarzschild { m: 1.0 }, c)?;
            let errs: Result<Vec<f64>> = [0.01, 0.5, 3.0, 40.0]
                .iter()
                .map(|&r| Ok((hawking_mass(&p, r)? - 1.0).abs()))
                .collect();
            Ok(max_of(errs?))
        }),
        spec(S, "schwarzschild_scalar_flat", 1e-8, |c| {
            let p = profile(&ModelSpec::Schwarzschild { m: 1.0 }, c)?;
            let errs: Result<Vec<f64>> = [0.3, 2.0, 10.0].iter().map(|&r| Ok(scalar_curvature(&p, r)?.abs())).collect();
            Ok(max_of(errs?))
        }),
        spec(S, "schwarzschild_zas_mass", 1e-5, |c| {
            let mut worst: f64 = 0.0;
            for m in [-0.5, -1.0, -2.0] {
                let p = profile(&ModelSpec::Schwarzschild { m }, c)?;
                worst = worst.max((zas_mass(&p)?.value() - m).abs() / m.abs());
                worst = worst.max((h43_mass_limit(&p)?.value() - m).abs() / m.abs());
            }
            Ok(worst)
        }),
        spec(S, "table2_cell_mismatches", 0.0, |c| {
            let mut bad = 0.0;
            for &a in &TABLE2_ALPHAS {
                let r = table2_row(a)?;
                let (cap, mass, reg, harm, rem) = table2_expected(a);
                let mass_ok = match (mass, r.mass) {
                    (ExtendedMass::NegInfinity, m) => m.is_neg_infinity(),
                    (ExtendedMass::Finite(v), ExtendedMass::Finite(w)) => (v - w).abs() <= 1e-5 * v.abs().max(c.tol.limit),
                    _ => false,
                };
                bad += count([
                    r.capacity_sign != cap,
                    !mass_ok,
                    r.regular != reg,
                    r.harmonically_regular != harm,
                    r.removable != rem,
                ]);
            }
            Ok(bad)
        }),
        spec(S, "table2_four_thirds_mass", 1e-5, |c| {
            let m = zas_mass(&power(4.0 / 3.0, c)?)?.value();
            Ok((m + 2.0 / 9.0).abs() * 4.5)
        }),
        spec(S, "positive_capacity_implies_neg_infinite_mass", 0.0, |c| {
            let mut bad = 0.0;
            for a in [0.25, 0.5, 0.75] {
                let p = power(a, c)?;
                let (_, sign) = capacity_of_zas(&p)?;
                bad += count([sign != CapacitySign::Positive, !zas_mass(&p)?.is_neg_infinity()]);
            }
            Ok(bad)
        }),
        spec(S, "penrose_equality_schwarzschild", 1e-6, |c| {
            let r = check_penrose(&profile(&ModelSpec::Schwarzschild { m: 1.0 }, c)?)?;
            Ok((r.adm - (r.horizon_area / (16.0 * PI)).sqrt()).abs())
        }),
        spec(S, "penrose_equality_cylinder_background", 1e-6, |c| {
            let r = check_penrose(&cylinder_background(1.0, 2.0)?.with_tolerances(c.tol))?;
            Ok((r.adm - (r.horizon_area / (16.0 * PI)).sqrt()).abs())
        }),
    ]
}

fn polynomial_pair() -> Result<ConformalPair> {
    let seg = Segment::arclength("shell", 1.0, 1.0, |t| (Jet::variable(t) + 1.0).powi(2).scale(4.0 * PI));
    let bg = RadialProfile::new(vec![seg], Some(Tail { mass: 0.0, x_start: 2.0 }))?;
    let u: JetFn = Arc::new(|t| {
        let x = Jet::variable(t);
        x * x * 0.3 - x * 0.2 + 1.5
    });
    ConformalPair::new(
        bg,
        ConformalFactor {
            pieces: vec![u],
            tail: Some(TailFactor { mass: 0.0 }),
        },
    )
}

fn schwarzschild_over_flat(m: f64) -> Result<ConformalPair> {
    ConformalPair::new(
        RadialProfile::isotropic(0.0, 0.25 * m.abs())?,
        ConformalFactor {
            pieces: vec![],
            tail: Some(TailFactor { mass: m }),
        },
    )
}

fn conformal_suite() -> Vec<Spec> {
    use Scope::ConformalToolkit as S;
    vec![
        spec(S, "laplacian_identity_order", 0.3, |_| {
            let cp = polynomial_pair()?;
            let phi = |p: Point| 2.0 + p.tau * p.tau * p.tau - 0.5 * p.tau;
            let mut worst: f64 = 0.0;
            for r in [0.3, 0.6] {
                let a = conformal_laplacian_residual(&cp, &phi, r, 1e-2)?;
                let b = conformal_laplacian_residual(&cp, &phi, r, 5e-3)?;
                worst = worst.max(((a / b).abs().log2() - 2.0).abs());
            }
            Ok(worst)
        }),
        spec(S, "harmonic_quotient_residual", 1e-6, |_| {
            let cp = schwarzschild_over_flat(1.0)?;
            let phi = |p: Point| 1.0 / cp.u(p).v;
            let r: Result<Vec<f64>> = [0.5, 1.0, 3.0]
                .iter()
                .map(|&s| Ok(conformal_laplacian_residual(&cp, &phi, s, 1e-3)?.abs()))
                .collect();
            Ok(max_of(r?))
        }),
        spec(S, "adm_shift_consistency", 1e-6, |_| {
            let flat = RadialProfile::isotropic(0.0, 1.0)?;
            let mut pairs = vec![
                ConformalPair::new(flat.clone(), ConformalFactor::identity(&flat))?,
                schwarzschild_over_flat(1.0)?,
                schwarzschild_over_flat(-2.0)?,
            ];
            pairs.push(build(&ModelSpec::SchwarzschildWithCylinder { mbar: 1.0, length: 4.0 })?.pair.ok_or(Error::NoTail)?);
            let mut worst: f64 = 0.0;
            for cp in &pairs {
                let lhs = adm_mass(&compose(cp)?)?;
                let rhs = adm_mass(&cp.background)? - adm_mass_shift(cp)?;
                worst = worst.max((lhs - rhs).abs());
            }
            Ok(worst)
        }),
        spec(S, "horizon_minimality", 1e-10, |_| {
            let m = 1.0;
            let cp = schwarzschild_over_flat(m)?;
            // Flat radius m/2 sits at τ = m/4 past the chart start m/4.
            let pt = cp.background.point(0, 0.25 * m);
            let u = cp.u(pt);
            let h1 = 2.0 / (0.5 * m);
            Ok(conformal_mean_curvature(u.v, u.d1, h1)?.abs())
        }),
        spec(S, "scalar_sign_preservation", 1e-6, |_| {
            let cp = schwarzschild_over_flat(1.0)?;
            let mut worst: f64 = 0.0;
            for tau in [0.1, 0.5, 2.0, 10.0] {
                let u = cp.u(cp.background.point(0, tau));
                let x = 0.25 + tau;
                let lap = u.d2 + 2.0 / x * u.d1;
                worst = worst.max((-conformal_scalar_curvature(u.v, lap, 0.0)?).max(0.0));
            }
            Ok(worst)
        }),
        spec(S, "exp_warp_not_harmonically_regular", 0.0, |_| {
            let (bg, phi) = models::exp_warp_resolution()?;
            let t = harmonic_resolution_test(&bg, &phi)?;
            Ok(count([t.harmonically_regular, t.log_slope.abs() <= 1e-3]))
        }),
        spec(S, "four_thirds_log_slope", 1e-4, |_| {
            let (bg, phi) = models::four_thirds_resolution()?;
            let t = harmonic_resolution_test(&bg, &phi)?;
            Ok(if t.harmonically_regular { t.log_slope.abs() } else { f64::INFINITY })
        }),
        spec(S, "counterexample_threshold", 0.02, |_| {
            Ok((counterexample_flip(0.5, 1.2, 1e-6)? - counterexample_threshold()).abs())
        }),
    ]
}

fn model_suite() -> Vec<Spec> {
    use Scope::ModelLibrary as S;
    vec![
        spec(S, "adm_expectations", 1e-6, |c| {
            let mut worst: f64 = 0.0;
            worst = worst.max(adm_mass(&profile(&ModelSpec::Flat, c)?)?.abs());
            for m in [-1.0, 0.7, 2.0] {
                worst = worst.max((adm_mass(&profile(&ModelSpec::Schwarzschild { m }, c)?)? - m).abs());
            }
            for (mbar, l) in [(0.5, 1.0), (1.0, 4.0), (2.0, 10.0)] {
                let model = build(&ModelSpec::SchwarzschildWithCylinder { mbar, length: l })?;
                let b = cylinder_reference(mbar, l)?.b;
                worst = worst.max((adm_mass(&model.profile)? - b).abs());
                worst = worst.max((adm_mass(&cylinder_background(mbar, l)?)? - mbar).abs());
            }
            Ok(worst)
        }),
        spec(S, "cylinder_grid_inequality_violations", 0.0, |c| {
            let mut bad = 0.0;
            for mbar in [0.5, 1.0, 2.0] {
                for l in [0.0, 1.0, 4.0, 10.0] {
                    let p = profile(&ModelSpec::SchwarzschildWithCylinder { mbar, length: l }, c)?;
                    let r = check_zas_inequality(&p)?;
                    bad += count([!r.holds, r.equality != (l == 0.0)]);
                }
            }
            Ok(bad)
        }),
        spec(S, "long_cylinder_positive_mass_negative_zas", 0.0, |c| {
            let mut bad = 0.0;
            for (mbar, l) in [(0.5, 3.0), (1.0, 10.0), (2.0, 20.0)] {
                let p = profile(&ModelSpec::SchwarzschildWithCylinder { mbar, length: l }, c)?;
                bad += count([!(adm_mass(&p)? > 0.0), !(zas_mass(&p)?.value() < 0.0)]);
            }
            Ok(bad)
        }),
        spec(S, "sin_bump_boundary_mean_curvature", 1e-12, |c| {
            let mut worst: f64 = 0.0;
            for eps in [0.1, 0.5, 1.0] {
                let p = profile(&ModelSpec::SinBump { eps }, c)?;
                worst = worst.max((mean_curvature(&p, 0.0)? - 1.0 / (1.0 + eps)).abs());
            }
            Ok(worst)
        }),
        spec(S, "cylinder_shooting_closed_forms", 1e-6, |_| {
            let mut worst: f64 = 0.0;
            for mbar in [0.5, 1.0, 2.0] {
                for l in [0.0, 1.0, 4.0, 10.0] {
                    let s = cylinder_shooting(mbar, l)?;
                    let r = cylinder_reference(mbar, l)?;
                    worst = worst.max(rel(s.a, r.a)).max(rel(s.b, r.b)).max(rel(s.zas_mass, r.zas_mass));
                }
            }
            Ok(worst)
        }),
    ]
}

/// Gates widen in proportion to a quadrature tolerance looser than the default.
pub fn gate_scale(tol: &Tolerances) -> f64 {
    (tol.quad / Tolerances::default().quad).max(1.0)
}

pub fn verify(scope: Scope, cfg: &VerifyConfig) -> VerifyReport {
    let mut specs = Vec::new();
    for (s, suite) in [
        (Scope::NumericKernel, numeric_suite as fn() -> Vec<Spec>),
        (Scope::RadialGeometry, geometry_suite),
        (Scope::ConformalToolkit, conformal_suite),
        (Scope::ModelLibrary, model_suite),
    ] {
        if scope.includes(s) {
            specs.extend(suite());
        }
    }
    let scale = gate_scale(&cfg.tol);
    let checks = map(&specs, cfg.exec, |s| {
        let gate = s.base_gate * scale;
        match (s.probe)(cfg) {
            Ok(residual) => Check {
                suite: s.suite,
                name: s.name.to_string(),
                residual,
                gate,
                passed: residual <= gate,
                error: None,
            },
            Err(e) => Check {
                suite: s.suite,
                name: s.name.to_string(),
                residual: f64::NAN,
                gate,
                passed: false,
                error: Some(e.to_string()),
            },
        }
    });
    VerifyReport {
        scope,
        tolerances: cfg.tol,
        seed: cfg.seed,
        gate_scale: scale,
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scope_names_roundtrip() {
        for s in [
            Scope::All,
            Scope::NumericKernel,
            Scope::RadialGeometry,
            Scope::ConformalToolkit,
            Scope::ModelLibrary,
        ] {
            assert_eq!(s.to_string().parse::<Scope>().unwrap(), s);
        }
        assert!("geometry".parse::<Scope>().is_err());
    }

    #[test]
    fn radial_geometry_passes() {
        let r = verify(Scope::RadialGeometry, &VerifyConfig::default());
        for c in &r.checks {
            assert!(c.passed, "{c:?}");
        }
    }
}
