use std::f64::consts::PI;

use zas_core::geometry::*;
use zas_core::models::{build, cylinder_background, ModelSpec, PowerTail};
use zas_core::Error;

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol * b.abs().max(1.0), "{a} vs {b}");
}

fn power(alpha: f64) -> RadialProfile {
    build(&ModelSpec::PowerLawZas {
        alpha,
        tail: PowerTail::Blend,
    })
    .unwrap()
    .profile
}

fn schw(m: f64) -> RadialProfile {
    build(&ModelSpec::Schwarzschild { m }).unwrap().profile
}

fn flat() -> RadialProfile {
    build(&ModelSpec::Flat).unwrap().profile
}

#[test]
fn mean_curvature_examples() {
    close(mean_curvature(&flat(), 2.0).unwrap(), 1.0, 1e-12);
    let cyl = cylinder_background(1.0, 2.0).unwrap();
    close(mean_curvature(&cyl, 1.0).unwrap(), 0.0, 1e-12);
    let bump = build(&ModelSpec::SinBump { eps: 0.1 }).unwrap().profile;
    close(mean_curvature(&bump, 0.0).unwrap(), 1.0 / 1.1, 1e-12);
}

#[test]
fn hawking_mass_examples() {
    for rho in [0.3, 1.0, 7.0] {
        close(hawking_mass(&flat(), rho).unwrap(), 0.0, 1e-12);
    }
    let s = schw(1.0);
    for rho in [0.01, 0.5, 3.0, 40.0] {
        close(hawking_mass(&s, rho).unwrap(), 1.0, 1e-9);
    }
    close(hawking_mass(&cylinder_background(1.0, 2.0).unwrap(), 1.0).unwrap(), 1.0, 1e-12);
}

#[test]
fn harmonic_potential_examples() {
    close(harmonic_potential(&flat(), 1.0, 2.0).unwrap(), 0.5, 1e-9);
    close(harmonic_potential(&power(3.0), 0.4, 0.4).unwrap(), 0.0, 1e-12);
    // Exterior Schwarzschild from the horizon t = 1/2, chart starting at t = 1/4.
    let s = schw(1.0);
    let horizon = s.segments()[0].arclength_to(0.25);
    let t = 400.0;
    let r = s.segments()[0].arclength_to(t - 0.25);
    let expected = (1.0 - 1.0 / (2.0 * t)) / (1.0 + 1.0 / (2.0 * t));
    close(harmonic_potential(&s, horizon, r).unwrap(), expected, 1e-8);
}

#[test]
fn capacity_examples() {
    close(capacity_of_slice(&flat(), 1.0).unwrap(), 4.0 * PI, 1e-9);
    close(capacity_of_slice(&flat(), 0.25).unwrap(), PI, 1e-9);
    for p in [flat(), power(0.5), schw(1.0), build(&ModelSpec::SinBump { eps: 0.3 }).unwrap().profile] {
        assert!(capacity_of_slice(&p, 1.0).unwrap() < capacity_of_slice(&p, 2.0).unwrap());
    }
}

#[test]
fn capacity_of_zas_examples() {
    let (c, sign) = capacity_of_zas(&power(0.5)).unwrap();
    assert_eq!(sign, CapacitySign::Positive);
    assert!(c > 0.0);
    assert_eq!(capacity_of_zas(&power(4.0 / 3.0)).unwrap().1, CapacitySign::Zero);
    assert_eq!(capacity_of_zas(&schw(-2.0)).unwrap().1, CapacitySign::Zero);
}

#[test]
fn regular_mass_examples() {
    close(reg_mass_of_slice(&flat(), 0.5).unwrap(), -1.0, 1e-9);
    close(reg_mass_of_slice(&flat(), 0.1).unwrap(), -0.2, 1e-9);
    close(zas_mass(&schw(-1.0)).unwrap().value(), -1.0, 1e-5);
}

#[test]
fn zas_mass_examples() {
    close(zas_mass(&power(4.0 / 3.0)).unwrap().value(), -2.0 / 9.0, 1e-5);
    assert!(zas_mass(&power(1.0)).unwrap().is_neg_infinity());
    close(zas_mass(&power(2.0)).unwrap().value(), 0.0, 1e-9);
    close(h43_mass_limit(&schw(-1.0)).unwrap().value(), -1.0, 1e-5);
    close(h43_mass_limit(&power(4.0 / 3.0)).unwrap().value(), -2.0 / 9.0, 1e-5);
    close(h43_mass_limit(&flat()).unwrap().value(), 0.0, 1e-9);
}

#[test]
fn adm_mass_examples() {
    assert_eq!(adm_mass(&flat()).unwrap(), 0.0);
    assert_eq!(adm_mass(&schw(1.0)).unwrap(), 1.0);
    let cyl = build(&ModelSpec::SchwarzschildWithCylinder { mbar: 1.0, length: 4.0 }).unwrap();
    close(adm_mass(&cyl.profile).unwrap(), 0.0, 1e-12);
    let warp = build(&ModelSpec::ExpWarp).unwrap().profile;
    assert_eq!(adm_mass(&warp), Err(Error::NoTail));
}

#[test]
fn scalar_curvature_examples() {
    close(scalar_curvature(&flat(), 1.3).unwrap(), 0.0, 1e-9);
    close(scalar_curvature(&cylinder_background(1.0, 2.0).unwrap(), 1.0).unwrap(), 0.5, 1e-12);
    for rho in [0.3, 2.0, 10.0] {
        close(scalar_curvature(&schw(1.0), rho).unwrap(), 0.0, 1e-8);
    }
}

#[test]
fn omae_examples() {
    let bg = cylinder_background(1.0, 2.0).unwrap();
    let o = omae_radius(&bg).unwrap();
    close(o.s, 2.0, 1e-9);
    close(o.area, 16.0 * PI, 1e-12);
    assert_eq!(omae_radius(&flat()).unwrap().s, 0.0);
    let s = schw(1.0);
    let o = omae_radius(&s).unwrap();
    close(o.s, s.segments()[0].arclength_to(0.25), 1e-7);
    close(o.area, 16.0 * PI, 1e-12);
}

#[test]
fn classification_rows() {
    let r = classify_zas(&power(4.0 / 3.0)).unwrap();
    assert_eq!(r.capacity_sign, CapacitySign::Zero);
    close(r.mass.value(), -2.0 / 9.0, 1e-5);
    assert!(r.regular && r.harmonically_regular && !r.removable);

    let r = classify_zas(&power(2.0)).unwrap();
    assert_eq!(r.capacity_sign, CapacitySign::Zero);
    assert_eq!(r.mass, ExtendedMass::Finite(0.0));
    assert!(!r.regular && r.removable);

    let r = classify_zas(&power(3.0)).unwrap();
    assert_eq!(r.capacity_sign, CapacitySign::Zero);
    assert_eq!(r.mass, ExtendedMass::Finite(0.0));
    assert!(!r.regular && !r.removable);

    let r = classify_zas(&power(0.5)).unwrap();
    assert_eq!(r.capacity_sign, CapacitySign::Positive);
    assert!(r.mass.is_neg_infinity());
    assert!(!r.regular && !r.harmonically_regular);

    let r = classify_zas(&schw(-1.0)).unwrap();
    assert_eq!(r.capacity_sign, CapacitySign::Zero);
    close(r.mass.value(), -1.0, 1e-5);
    assert!(r.regular && r.harmonically_regular);

    assert_eq!(classify_zas(&schw(1.0)), Err(Error::NotZas));
}

#[test]
fn mass_combination_examples() {
    assert_eq!(combine_zas_masses(&[-1.0]).unwrap(), -1.0);
    close(combine_zas_masses(&[-1.0, -1.0]).unwrap(), -2.0 * 2f64.sqrt(), 1e-12);
    close(combine_zas_masses(&[-8.0, -1.0]).unwrap(), -(5f64.powf(1.5)), 1e-12);
    close(combine_bh_masses(&[3.0, 4.0]).unwrap(), 5.0, 1e-12);
    close(combine_bh_masses(&[1.0, 1.0, 1.0, 1.0]).unwrap(), 2.0, 1e-12);
}

#[test]
fn zas_inequality_examples() {
    let r = check_zas_inequality(&schw(-1.0)).unwrap();
    assert!(r.holds && r.equality);
    close(r.adm, -1.0, 1e-12);

    let cyl = build(&ModelSpec::SchwarzschildWithCylinder { mbar: 1.0, length: 4.0 }).unwrap();
    let r = check_zas_inequality(&cyl.profile).unwrap();
    assert!(r.holds && !r.equality);
    close(r.zas_mass.value(), -0.25, 1e-5);

    let matched = build(&ModelSpec::PowerLawZas {
        alpha: 1.0,
        tail: PowerTail::Schwarzschild,
    })
    .unwrap();
    let r = check_zas_inequality(&matched.profile).unwrap();
    assert!(r.holds && r.zas_mass.is_neg_infinity());
}

#[test]
fn penrose_examples() {
    let r = check_penrose(&schw(1.0)).unwrap();
    assert!(r.holds && r.equality);
    let r = check_penrose(&cylinder_background(1.0, 2.0).unwrap()).unwrap();
    assert!(r.holds && r.equality);
    close(r.horizon_area, 16.0 * PI, 1e-12);
    let r = check_penrose(&RadialProfile::isotropic(0.0, 0.1).unwrap()).unwrap();
    assert!(r.holds);
    assert_eq!(r.horizon_area, 0.0);
}

#[test]
fn negative_curvature_is_rejected() {
    // The blended α = 1/2 power law has R < 0 near its origin.
    let res = check_zas_inequality(&power(0.5));
    assert!(matches!(res, Err(Error::HypothesisViolated { .. })), "{res:?}");
}

#[test]
fn four_thirds_exponent_of_negative_schwarzschild() {
    let p = schw(-2.0).arclength_reparametrize().unwrap();
    let o = origin_power(&p).unwrap();
    close(o.exponent, 4.0 / 3.0, 1e-3);
}
