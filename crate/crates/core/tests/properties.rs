use std::f64::consts::TAU;

use approx::assert_relative_eq;
use ncc_core::cones::build_cone;
use ncc_core::desitter::{
    boost_flow, causal_leq, kms_member, lorentz_form, wedge_member, DSPoint, MinkowskiVector,
};
use ncc_core::grading::{euler_element, symmetric_structure};
use ncc_core::lie::{adjoint_action, bracket, build_algebra, killing, AlgebraElement, Family, GroupElement};
use ncc_core::numerics::{Matrix, Tolerances};
use proptest::prelude::*;

fn sl2_element(a: f64, b: f64, c: f64) -> AlgebraElement {
    let alg = build_algebra(Family::Sl, &[2]).unwrap();
    AlgebraElement::from_matrix(&alg, &Matrix::from_row_slice(2, 2, &[a, b, c, -a])).unwrap()
}

#[test]
fn data_file_matches_embedded_atlas() {
    let on_disk = include_str!("../../../data/atlas.json");
    assert_eq!(on_disk, ncc_core::atlas::embedded_source());
}

#[test]
fn so12_tube_is_lorentz() {
    let alg = build_algebra(Family::SoPq, &[1, 2]).unwrap();
    let s = symmetric_structure(&euler_element(&alg, "boost").unwrap()).unwrap();
    let cone = build_cone(&s, 64, 0).unwrap();
    assert!(cone.in_tube(s.h()).unwrap());
    assert!(!cone.in_tube(&s.h().scale(-1.0)).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn killing_is_ad_invariant(a in -1.0..1.0f64, b in -1.0..1.0f64, c in -1.0..1.0f64, t in -1.0..1.0f64) {
        let x = sl2_element(a, b, c);
        let y = sl2_element(b, c, a);
        let g = GroupElement::exp(&sl2_element(c, a, b).scale(t)).unwrap();
        let k0 = killing(&x, &y).unwrap();
        let k1 = killing(&adjoint_action(&g, &x).unwrap(), &adjoint_action(&g, &y).unwrap()).unwrap();
        prop_assert!((k0 - k1).abs() < 1e-9 * (1.0 + k0.abs()));
    }

    #[test]
    fn bracket_is_antisymmetric(a in -2.0..2.0f64, b in -2.0..2.0f64, c in -2.0..2.0f64) {
        let x = sl2_element(a, b, c);
        let y = sl2_element(c, -a, b);
        let s = &bracket(&x, &y).unwrap() + &bracket(&y, &x).unwrap();
        prop_assert!(s.norm() < 1e-12);
    }

    #[test]
    fn boosts_preserve_wedge_and_order(x0 in -2.0..2.0f64, phi in 0.0..TAU, t in -3.0..3.0f64) {
        let tol = Tolerances::default();
        let r = (1.0 + x0 * x0).sqrt();
        let x = DSPoint::from_components(vec![x0, r * phi.cos(), r * phi.sin()], &tol).unwrap();
        let y = boost_flow(t, &x);
        let q = lorentz_form(y.vector(), y.vector()).unwrap();
        prop_assert!((q + 1.0).abs() < 1e-9 * y.components().iter().map(|v| v * v).sum::<f64>().max(1.0));
        prop_assert_eq!(wedge_member(&x), wedge_member(&y));
        prop_assert!(causal_leq(&x, &x, &tol));
    }

    #[test]
    fn kms_matches_wedge_off_band(x0 in -2.0..2.0f64, phi in 0.0..TAU) {
        let tol = Tolerances::default();
        let r = (1.0 + x0 * x0).sqrt();
        let x = DSPoint::from_components(vec![x0, r * phi.cos(), r * phi.sin()], &tol).unwrap();
        let margin = x.components()[1] - x0.abs();
        prop_assume!(margin.abs() > 1e-3);
        prop_assert_eq!(kms_member(&x, 64, &tol).unwrap(), margin > 0.0);
    }
}

#[test]
fn base_point_orbit_is_timelike() {
    let tol = Tolerances::default();
    let e1 = DSPoint::base(2).unwrap();
    let y = boost_flow(0.7, &e1);
    let v = MinkowskiVector::new(vec![0.7f64.sinh(), 0.7f64.cosh(), 0.0]).unwrap();
    for (a, b) in y.components().iter().zip(v.components()) {
        assert_relative_eq!(*a, *b, epsilon = 1e-12);
    }
    assert!(causal_leq(&boost_flow(-0.2, &e1), &boost_flow(0.2, &e1), &tol));
}
