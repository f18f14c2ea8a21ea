use approx::assert_relative_eq;
use axial_lab::geometry::{build_foliation, Schwarzschild};
use axial_lab::LabError;
use proptest::prelude::*;

fn unit() -> Schwarzschild {
    Schwarzschild::new(1.0).unwrap()
}

#[test]
fn rejects_nonpositive_mass_and_interior_radii() {
    assert!(matches!(Schwarzschild::new(0.0), Err(LabError::Mass(_))));
    assert!(matches!(Schwarzschild::new(-1.0), Err(LabError::Mass(_))));
    let bg = unit();
    assert!(matches!(bg.point(2.0), Err(LabError::Domain { .. })));
    assert!(matches!(bg.tortoise(1.5), Err(LabError::Domain { .. })));
}

#[test]
fn tortoise_closed_form_values() {
    // r* = r + 2M ln(r − 2M) − 3M − 2M ln M, evaluated by hand for M = 1 and M = 2.
    let bg = unit();
    assert_relative_eq!(bg.tortoise(3.0).unwrap(), 0.0, epsilon = 1e-15);
    assert_relative_eq!(bg.tortoise(4.0).unwrap(), 1.0 + 2.0 * 2f64.ln(), epsilon = 1e-14);
    let heavy = Schwarzschild::new(2.0).unwrap();
    assert_relative_eq!(heavy.tortoise(6.0).unwrap(), 6.0 - 6.0, epsilon = 1e-14);
    assert_relative_eq!(heavy.tortoise(10.0).unwrap(), 10.0 + 4.0 * 6f64.ln() - 6.0 - 4.0 * 2f64.ln(), epsilon = 1e-13);
}

#[test]
fn surface_gravity_and_offsets() {
    let bg = Schwarzschild::new(1.5).unwrap();
    assert_relative_eq!(bg.surface_gravity(), 1.0 / 6.0, epsilon = 1e-15);
    assert_relative_eq!(bg.horizon(), 3.0);
    assert_relative_eq!(bg.offset_difference(), 4.5 + 3.0 * 1.5f64.ln(), epsilon = 1e-14);
    // t* − t − (r* − r) is the same constant at every event.
    for r in [3.5, 4.0, 17.0, 300.0] {
        let c = bg.coordinate_maps(7.0, r).unwrap();
        assert_relative_eq!(c.t_star - 7.0 - (c.r_star - r), bg.offset_difference(), epsilon = 1e-12);
        assert_relative_eq!(c.u + c.v, 7.0, epsilon = 1e-12);
        assert_relative_eq!(c.v - c.u, c.r_star, epsilon = 1e-12);
    }
}

#[test]
fn metric_functions_at_photon_sphere() {
    let bg = unit();
    assert_relative_eq!(bg.a(3.0), 1.0 / 3.0, epsilon = 1e-15);
    assert_relative_eq!(bg.mu(3.0), 2.0 / 3.0, epsilon = 1e-15);
    assert_relative_eq!(bg.delta(3.0), 3.0, epsilon = 1e-15);
}

#[test]
fn horizon_side_points_keep_precision() {
    let bg = unit();
    let p = bg.point_from_tortoise(-300.0);
    assert!(p.x > 0.0 && p.a > 0.0);
    // r − 2M = M exp((r* − r + 3M)/2M) with r ≈ 2M.
    assert_relative_eq!(p.x.ln(), (-300.0 - 2.0 + 3.0) / 2.0, max_relative = 1e-12);
}

#[test]
fn sigma_height_slope_matches_finite_difference() {
    let bg = unit();
    for rs in [-40.0, -3.0, 0.0, 5.0, 60.0] {
        let d = 1e-4;
        let (h0, hp) = bg.sigma_height(&bg.point_from_tortoise(rs));
        let hi = bg.sigma_height(&bg.point_from_tortoise(rs + d)).0;
        let lo = bg.sigma_height(&bg.point_from_tortoise(rs - d)).0;
        assert!(h0.is_finite());
        assert_relative_eq!((hi - lo) / (2.0 * d), hp, epsilon = 1e-7);
    }
}

#[test]
fn foliation_is_spacelike_and_outside_the_null_cones() {
    let bg = unit();
    let fol = build_foliation(&bg, -30.0, 300.0, 0.05).unwrap();
    assert!(fol.spacelike_margin > 0.0, "margin {}", fol.spacelike_margin);
    assert!(fol.null_margin >= -1e-12, "null margin {}", fol.null_margin);
    for row in &fol.table {
        assert!(row.h_prime.abs() < 1.0);
        assert!(row.h >= row.r_star.abs() - 1e-12);
    }
}

#[test]
fn foliation_height_is_c1_across_the_blend() {
    let bg = unit();
    let fol = build_foliation(&bg, -30.0, 300.0, 0.05).unwrap();
    for r in [3.0, 20.0] {
        let (below, above) = (bg.point(r - 1e-7).unwrap(), bg.point(r + 1e-7).unwrap());
        let (h0, p0) = fol.height(&below);
        let (h1, p1) = fol.height(&above);
        assert_relative_eq!(h0, h1, epsilon = 1e-6);
        assert_relative_eq!(p0, p1, epsilon = 1e-6);
    }
    let d = 1e-4;
    for rs in [-10.0, 1.0, 8.0, 15.0, 40.0] {
        let hp = fol.height(&bg.point_from_tortoise(rs)).1;
        let fd = (fol.height(&bg.point_from_tortoise(rs + d)).0 - fol.height(&bg.point_from_tortoise(rs - d)).0) / (2.0 * d);
        assert_relative_eq!(fd, hp, epsilon = 1e-6);
    }
}

#[test]
fn empty_foliation_window_is_an_error() {
    assert!(build_foliation(&unit(), 10.0, 0.0, 0.1).is_err());
}

proptest! {
    #[test]
    fn tortoise_derivative_is_inverse_lapse(r in 2.05f64..100.0) {
        let bg = unit();
        let d = 1e-4 * (r - 2.0).min(1.0);
        let fd = (bg.tortoise(r + d).unwrap() - bg.tortoise(r - d).unwrap()) / (2.0 * d);
        prop_assert!((fd * bg.a(r) - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn tortoise_is_strictly_increasing(r in 2.001f64..1000.0, step in 1e-6f64..10.0) {
        let bg = unit();
        prop_assert!(bg.tortoise(r + step).unwrap() > bg.tortoise(r).unwrap());
    }

    #[test]
    fn delta_equals_r_squared_lapse(m in 0.1f64..10.0, k in 1.0001f64..100.0) {
        let bg = Schwarzschild::new(m).unwrap();
        let r = 2.0 * m * k;
        prop_assert!((bg.delta(r) - r * r * bg.a(r)).abs() <= 4.0 * f64::EPSILON * r * r);
    }

    #[test]
    fn inverse_tortoise_round_trips(rs in -250.0f64..2000.0) {
        let bg = unit();
        let p = bg.point_from_tortoise(rs);
        // Through the stored x = r − 2M, which stays exact where r rounds to 2M.
        let back = p.r + 2.0 * p.x.ln() - 3.0;
        prop_assert!((back - rs).abs() <= 1e-10 * (1.0 + rs.abs()));
        prop_assert!((p.a - p.x / p.r).abs() <= 1e-15);
    }
}
