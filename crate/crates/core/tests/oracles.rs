//! Reference values computed independently at 30 digits and frozen here.

use approx::assert_relative_eq;
use hyperlevel::geometry::{geodesic_ball_volume, geodesic_sphere_area, GeodesicRadius};
use hyperlevel::holo::{MultiIndex, Polynomial};
use hyperlevel::inequalities::{
    ell_integral_closed, ell_integral_quadrature, sobolev_constant, sup_bound_prefactor, weighted_hardy_check,
    HardyProbe,
};
use hyperlevel::integrate::exact_sphere_monomial;
use hyperlevel::norms::{bergman_constant, layer_cake_constant};
use hyperlevel::superlevel::{coordinate_annulus_measure, weak_type_bound};
use hyperlevel::Complex64;

fn rho(r: f64) -> GeodesicRadius {
    GeodesicRadius::new(r).unwrap()
}

#[test]
fn geodesic_ball_volumes() {
    assert_relative_eq!(geodesic_ball_volume(rho(1.0), 1).unwrap(), 1.381_097_845_541_815_7, max_relative = 1e-14);
    assert_relative_eq!(geodesic_ball_volume(rho(0.5), 2).unwrap(), 0.073_734_143_977_832_04, max_relative = 1e-14);
    assert_relative_eq!(geodesic_ball_volume(rho(2.0), 3).unwrap(), 2_276.067_007_425_039, max_relative = 1e-13);
    assert_eq!(geodesic_ball_volume(rho(0.0), 2).unwrap(), 0.0);
}

#[test]
fn geodesic_sphere_areas() {
    assert_relative_eq!(geodesic_sphere_area(rho(1.0), 1).unwrap(), 3.626_860_407_847_018_8, max_relative = 1e-14);
    assert_relative_eq!(geodesic_sphere_area(rho(1.5), 2).unwrap(), 90.838_703_757_729_71, max_relative = 1e-13);
    assert!(geodesic_sphere_area(rho(0.0), 1).is_err());
}

#[test]
fn large_radii_stay_finite_in_log_space() {
    let v = geodesic_ball_volume(rho(320.0), 1).unwrap();
    let expected = (2.0 * (320.0 - std::f64::consts::LN_2)).exp();
    assert_relative_eq!(v, expected, max_relative = 1e-12);
    assert!(geodesic_ball_volume(rho(400.0), 2).is_err());
}

#[test]
fn bergman_and_layer_cake_constants() {
    assert_relative_eq!(bergman_constant(1, 2.0).unwrap(), 1.0, max_relative = 1e-14);
    assert_relative_eq!(bergman_constant(2, 2.5).unwrap(), 0.375, max_relative = 1e-14);
    assert_relative_eq!(bergman_constant(3, 5.0).unwrap(), 4.0, max_relative = 1e-13);
    assert_relative_eq!(layer_cake_constant(2, 2.5).unwrap(), 2.5 * 0.375, max_relative = 1e-13);
    assert!(bergman_constant(2, 2.0).is_err());
}

#[test]
fn sobolev_constants() {
    assert_relative_eq!(sobolev_constant(2, 1.5).unwrap(), 1.425_246_645_098_354_5, max_relative = 1e-12);
    assert_relative_eq!(sobolev_constant(4, 2.0).unwrap(), 2.149_139_863_647_083_8, max_relative = 1e-12);
    assert_relative_eq!(sobolev_constant(6, 3.0).unwrap(), 1.820_886_693_008_751_7, max_relative = 1e-12);
    assert_eq!(sobolev_constant(4, 1.0).unwrap(), 4.0);
    assert!(sobolev_constant(4, 4.0).is_err());
}

#[test]
fn ell_integrals() {
    assert_relative_eq!(ell_integral_closed(1, 4.0).unwrap(), 5.299_916_250_856_35, max_relative = 1e-13);
    assert_relative_eq!(ell_integral_closed(2, 5.0).unwrap(), 18.617_481_139_492_31, max_relative = 1e-13);
    assert_relative_eq!(ell_integral_closed(1, 3.0).unwrap(), 5.244_115_108_584_24, max_relative = 1e-13);
    assert_relative_eq!(ell_integral_quadrature(2, 5.0).unwrap(), 18.617_481_139_492_31, max_relative = 1e-9);
    assert_relative_eq!(sup_bound_prefactor(1, 4.0).unwrap(), 2.649_958_125_428_175, max_relative = 1e-13);
    assert!(ell_integral_closed(2, 4.0).is_err());
}

#[test]
fn sphere_moments_and_closed_norms() {
    let m = |e: Vec<u32>| MultiIndex::new(e);
    assert_relative_eq!(exact_sphere_monomial(&m(vec![1, 1]), &m(vec![1, 1]), 2).unwrap(), 1.0 / 6.0, max_relative = 1e-15);
    assert_relative_eq!(exact_sphere_monomial(&m(vec![2, 0, 0]), &m(vec![2, 0, 0]), 3).unwrap(), 1.0 / 6.0, max_relative = 1e-15);
    assert_eq!(exact_sphere_monomial(&m(vec![1, 0]), &m(vec![0, 1]), 2).unwrap(), 0.0);

    // z1 + 0.5i z2^2
    let f = Polynomial::from_terms(
        2,
        [(m(vec![1, 0]), Complex64::new(1.0, 0.0)), (m(vec![0, 2]), Complex64::new(0.0, 0.5))],
    )
    .unwrap();
    assert_relative_eq!(f.hardy2_norm_sq(), 7.0 / 12.0, max_relative = 1e-15);
    assert_relative_eq!(f.bergman2_norm_sq(2.5).unwrap(), 16.0 / 35.0, max_relative = 1e-14);
}

#[test]
fn annulus_measure_and_weak_type_bound() {
    assert_relative_eq!(coordinate_annulus_measure(0.1), 7.745_966_692_414_834, max_relative = 1e-13);
    assert_eq!(coordinate_annulus_measure(0.25), 0.0);
    assert_eq!(coordinate_annulus_measure(0.0), f64::INFINITY);
    assert_relative_eq!(weak_type_bound(0.25, 2), 9.0, max_relative = 1e-15);
    assert_eq!(weak_type_bound(1.0, 3), 0.0);
}

#[test]
fn weighted_hardy_on_an_indicator() {
    // f = 1 on (0, 1), p = 2, ε = 2: lhs = 4 ∫_0^1 x^2 = 4/3, rhs = ∫_0^1 (1-x)^2 dx = 1/3
    let r = weighted_hardy_check(&HardyProbe::Indicator { a: 0.0, b: 1.0 }, 2.0, 2.0).unwrap();
    assert_relative_eq!(r.lhs, 4.0 / 3.0, max_relative = 1e-10);
    assert_relative_eq!(r.rhs, 1.0 / 3.0, max_relative = 1e-10);
    assert!(r.check.pass);
}
