use std::f64::consts::PI;
use std::sync::Arc;

use zas_core::conformal::*;
use zas_core::geometry::*;
use zas_core::models::{self, build, ModelSpec};
use zas_core::numeric::Jet;

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol * b.abs().max(1.0), "{a} vs {b}");
}

fn bump(eps: f64) -> RadialProfile {
    build(&ModelSpec::SinBump { eps }).unwrap().profile
}

#[test]
fn identity_factor_leaves_flat_alone() {
    let flat = RadialProfile::isotropic(0.0, 1.0).unwrap();
    let cp = ConformalPair::new(flat.clone(), ConformalFactor::identity(&flat)).unwrap();
    let out = compose(&cp).unwrap();
    for s in [0.0, 0.5, 3.0, 20.0] {
        close(out.area_jet(s).unwrap().v, flat.area_jet(s).unwrap().v, 1e-12);
    }
    assert_eq!(adm_mass_shift(&cp).unwrap(), 0.0);
}

#[test]
fn negative_mass_resolution_composes_to_a_zas() {
    let m = build(&ModelSpec::Schwarzschild { m: -2.0 }).unwrap();
    let out = compose(m.pair.as_ref().unwrap()).unwrap();
    assert!(is_zas(&out));
    let o = origin_power(&out.arclength_reparametrize().unwrap()).unwrap();
    close(o.exponent, 4.0 / 3.0, 1e-3);
    close(adm_mass(&out).unwrap(), -2.0, 1e-12);
}

#[test]
fn cylinder_pair_has_adm_mass_b() {
    for (mbar, l) in [(1.0, 4.0), (1.0, 12.0), (0.5, 1.0)] {
        let m = build(&ModelSpec::SchwarzschildWithCylinder { mbar, length: l }).unwrap();
        let b = m.cylinder.unwrap().b;
        close(adm_mass(&m.profile).unwrap(), b, 1e-12);
        let cp = m.pair.unwrap();
        close(adm_mass(&cp.background).unwrap() - adm_mass_shift(&cp).unwrap(), b, 1e-6);
    }
}

#[test]
fn schwarzschild_shift_from_flat() {
    let m = build(&ModelSpec::Schwarzschild { m: 1.0 }).unwrap();
    close(adm_mass_shift(m.pair.as_ref().unwrap()).unwrap(), -1.0, 1e-12);
}

#[test]
fn harmonic_quotient_residual() {
    // u = 1 + 1/(2x) over flat: both sides of the identity vanish.
    let flat = RadialProfile::isotropic(0.0, 1.0).unwrap();
    let cp = ConformalPair::new(
        flat,
        ConformalFactor {
            pieces: vec![],
            tail: Some(TailFactor { mass: 1.0 }),
        },
    )
    .unwrap();
    let phi = |p: Point| 1.0 / (1.0 + 0.5 / (1.0 + p.tau));
    for r in [0.5, 1.0, 3.0] {
        let res = conformal_laplacian_residual(&cp, &phi, r, 1e-3).unwrap();
        assert!(res.abs() < 1e-6, "{res}");
    }
}

#[test]
fn residual_converges_at_second_order() {
    let seg = Segment::arclength("shell", 1.0, 1.0, |t| (Jet::variable(t) + 1.0).powi(2).scale(4.0 * PI));
    let bg = RadialProfile::new(vec![seg], Some(Tail { mass: 0.0, x_start: 2.0 })).unwrap();
    let u: JetFn = Arc::new(|t| {
        let x = Jet::variable(t);
        x * x * 0.3 - x * 0.2 + 1.5
    });
    let cp = ConformalPair::new(
        bg,
        ConformalFactor {
            pieces: vec![u],
            tail: Some(TailFactor { mass: 0.0 }),
        },
    )
    .unwrap();
    let phi = |p: Point| 2.0 + p.tau * p.tau * p.tau - 0.5 * p.tau;
    let r = 0.4;
    let a = conformal_laplacian_residual(&cp, &phi, r, 1e-2).unwrap();
    let b = conformal_laplacian_residual(&cp, &phi, r, 5e-3).unwrap();
    let ratio = a / b;
    assert!((ratio - 4.0).abs() < 0.5, "{a} {b} {ratio}");
}

#[test]
fn pointwise_curvature_examples() {
    close(conformal_scalar_curvature(1.0, 0.0, 5.0).unwrap(), 5.0, 1e-15);
    close(conformal_scalar_curvature(1.0, -1.0, 0.0).unwrap(), 8.0, 1e-15);
    let m = 2.0;
    close(conformal_mean_curvature(2.0, -2.0 / m, 4.0 / m).unwrap(), 0.0, 1e-15);
    // Boundary of the bump with u = 1, u' = −H₁/4.
    let eps = 0.1;
    let h1 = 1.0 / (1.0 + eps);
    let nu_u = -h1 / 4.0;
    close(conformal_mean_curvature(1.0, nu_u, h1).unwrap(), 0.0, 1e-15);
}

#[test]
fn harmonic_resolution_examples() {
    let (bg, phi) = models::exp_warp_resolution().unwrap();
    let t = harmonic_resolution_test(&bg, &phi).unwrap();
    assert!(!t.harmonically_regular, "{t:?}");
    assert!(t.log_slope.abs() > 1e-3);

    let (bg, phi) = models::four_thirds_resolution().unwrap();
    let t = harmonic_resolution_test(&bg, &phi).unwrap();
    assert!(t.harmonically_regular, "{t:?}");

    let (bg, phi) = models::flat_exterior_resolution().unwrap();
    let t = harmonic_resolution_test(&bg, &phi).unwrap();
    assert!(t.harmonically_regular, "{t:?}");
    assert!(t.log_slope.abs() <= 1e-3);
}

#[test]
fn resolution_precondition_is_checked() {
    let (bg, _) = models::four_thirds_resolution().unwrap();
    let bad: JetFn = Arc::new(|t| Jet::variable(t) + 1.0);
    assert!(matches!(
        harmonic_resolution_test(&bg, &bad),
        Err(zas_core::Error::ResolutionInvalid(_))
    ));
}

#[test]
fn min_boundary_examples() {
    let two_pi = 2.0 * PI;
    let r = min_boundary_conformal_factor(&bump(0.1), Some(two_pi)).unwrap();
    close(r.ratio, -1.0 / (4.0 * 1.1), 1e-12);
    let z = r.first_zero.expect("vanishes");
    assert!(z > 0.0 && z < two_pi);
    assert!(min_boundary_conformal_factor(&bump(1.0), Some(two_pi)).unwrap().first_zero.is_none());

    let flat = RadialProfile::isotropic(0.0, 1.0).unwrap();
    let r = min_boundary_conformal_factor(&flat, None).unwrap();
    close(r.ratio, -0.5, 1e-12);
    assert!(r.first_zero.is_none());
}

#[test]
fn min_boundary_threshold_flips() {
    let two_pi = 2.0 * PI;
    let threshold = (1.0 + PI * PI / 4.0).sqrt() - 1.0;
    let below = min_boundary_conformal_factor(&bump(threshold - 0.01), Some(two_pi)).unwrap();
    let above = min_boundary_conformal_factor(&bump(threshold + 0.01), Some(two_pi)).unwrap();
    assert!(below.first_zero.is_some());
    assert!(above.first_zero.is_none());
    for eps in [0.1, 0.5, 0.8, 0.9, 1.0] {
        let r = min_boundary_conformal_factor(&bump(eps), Some(two_pi)).unwrap();
        let oracle = two_pi / (eps * eps + 2.0 * eps).sqrt() / (4.0 * PI);
        close(r.flux_available, oracle, 1e-8);
    }
}
