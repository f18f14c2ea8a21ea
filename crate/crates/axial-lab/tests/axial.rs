use approx::assert_relative_eq;
use axial_lab::axial::{
    beta1_ode_check, beta1_second_branch, consistent_initial_data, constraint_residuals, coupled_evolver, coupling,
    fields_from_q, kerr_q02, make_discretely_static, normalize_kerr, q_from_fields, reconstruct_gamma,
    verify_beta1_static, ConnectionComponents, ResidualRecorder,
};
use axial_lab::evolution::{BumpProfile, FlatSnapshot, Grid, Observer, Profile, RadialTable, Scheme, SnapshotRecorder};
use axial_lab::geometry::Schwarzschild;
use axial_lab::harmonics::SphereGrid;
use axial_lab::LabError;
use num_complex::Complex64;
use proptest::prelude::*;

fn unit() -> Schwarzschild {
    Schwarzschild::new(1.0).unwrap()
}

fn table(lo: f64, hi: f64, h: f64) -> RadialTable {
    RadialTable::new(&unit(), Grid::new(lo, hi, h).unwrap())
}

fn bump(amplitude: f64, center: f64, width: f64) -> Profile {
    Profile::GaussianBump(BumpProfile { amplitude, center, width })
}

#[test]
fn coupling_constants() {
    assert_relative_eq!(coupling(2), 2.0);
    assert_relative_eq!(coupling(3), 10f64.sqrt());
    assert_relative_eq!(coupling(1), 0.0);
}

#[test]
fn fields_and_connection_components_round_trip() {
    let bg = unit();
    let sphere = SphereGrid::for_lmax(6);
    let x = sphere.cos_theta().to_vec();
    let radii = vec![2.5, 4.0, 11.0];
    // Q's whose products with the sine powers vanish like sin^{2s} θ.
    let sin = |c: f64| (1.0 - c * c).sqrt();
    let q = ConnectionComponents {
        radii: radii.clone(),
        q02: radii.iter().map(|r| x.iter().map(|c| c / r + 1.0).collect()).collect(),
        q03: radii.iter().map(|r| x.iter().map(|&c| sin(c) * c * c * r).collect()).collect(),
        q23: radii.iter().map(|r| x.iter().map(|&c| sin(c) * (1.0 + c) / (r * r)).collect()).collect(),
    };
    let fields = fields_from_q(&bg, &sphere, &q).unwrap();
    let back = q_from_fields(&bg, &sphere, &fields).unwrap();
    for i in 0..radii.len() {
        for k in 0..x.len() {
            assert_relative_eq!(back.q02[i][k], q.q02[i][k], max_relative = 1e-12);
            assert_relative_eq!(back.q03[i][k], q.q03[i][k], max_relative = 1e-12);
            assert_relative_eq!(back.q23[i][k], q.q23[i][k], max_relative = 1e-12);
        }
    }
    assert!(matches!(
        fields_from_q(&bg, &sphere, &ConnectionComponents { radii: vec![1.5], ..q.clone() }),
        Err(LabError::Domain { .. })
    ));
}

#[test]
fn kerr_fields_have_inverse_square_beta() {
    let bg = Schwarzschild::new(1.3).unwrap();
    let sphere = SphereGrid::for_lmax(4);
    let n = sphere.len();
    let a1 = 0.7;
    let radii = vec![3.0, 5.0, 40.0];
    let q = ConnectionComponents {
        radii: radii.clone(),
        q02: radii.iter().map(|&r| vec![kerr_q02(&bg, a1, r); n]).collect(),
        q03: vec![vec![0.0; n]; 3],
        q23: vec![vec![0.0; n]; 3],
    };
    let fields = fields_from_q(&bg, &sphere, &q).unwrap();
    for (i, r) in radii.iter().enumerate() {
        for (k, c) in sphere.cos_theta().iter().enumerate() {
            let sin2 = 1.0 - c * c;
            assert_relative_eq!(fields.beta[i][k] * r * r / sin2, -6.0 * 1.3 * a1, max_relative = 1e-12);
        }
    }
}

#[test]
fn initial_data_rejects_modes_without_content() {
    let t = table(-40.0, 40.0, 0.2);
    let b = bump(1.0, 0.0, 1.0);
    assert!(matches!(consistent_initial_data(&t, 0, &Profile::Zero, &b), Err(LabError::Mode { .. })));
    assert!(matches!(consistent_initial_data(&t, 1, &b, &b), Err(LabError::Mode { .. })));
    assert!(consistent_initial_data(&t, 1, &Profile::Zero, &b).is_ok());
}

fn initial_residuals(h: f64) -> (f64, f64, f64) {
    let t = table(-40.0, 40.0, h);
    let slice = consistent_initial_data(&t, 2, &bump(1.0, 0.0, 2.0), &bump(0.5, 3.0, 2.0)).unwrap();
    let ev = coupled_evolver(&t, Scheme::Fourth, &slice).unwrap();
    let snap = FlatSnapshot::take(&ev, 4);
    // With exact γ_t the third equation is an identity of the data.
    let g_t: Vec<Complex64> = (0..t.grid.n)
        .map(|j| {
            let p = t.points[j];
            snap.waves[0].f_s[j] + snap.waves[0].f[j] * (2.0 * p.a / p.r)
        })
        .collect();
    let r = constraint_residuals(&t, &snap, 2, &g_t, 4);
    assert!(r.res_rthetaphi <= 1e-14);
    assert_relative_eq!(r.res_closed, r.res_gamma_rstar, max_relative = 1e-12);
    (r.res_rrphi, r.res_rtphi, r.res_closed)
}

#[test]
fn consistent_data_satisfies_the_constraints_at_the_start() {
    let (rr, rt, closed) = initial_residuals(0.1);
    assert!(rr <= 1e-14, "b_t − λa = {rr:.3e}");
    assert!(rt <= 1e-6, "r-t equation {rt:.3e}");
    assert!(closed <= 1e-6, "closing equation {closed:.3e}");
    let (_, rt2, closed2) = initial_residuals(0.05);
    assert!((rt / rt2).log2() > 3.5 && (closed / closed2).log2() > 3.5);
}

fn evolved_residuals(h: f64) -> f64 {
    let t = table(-40.0, 40.0, h);
    let slice = consistent_initial_data(&t, 3, &bump(1.0, 0.0, 2.0), &bump(0.5, 2.0, 2.0)).unwrap();
    let mut ev = coupled_evolver(&t, Scheme::Second, &slice).unwrap();
    let dt = 0.5 * h;
    let mut rec = ResidualRecorder::new(3, vec![5.0], 2);
    ev.run(5.0 + 4.0 * dt, dt, &mut [&mut rec as &mut dyn Observer]).unwrap();
    assert_eq!(rec.residuals.len(), 1);
    let r = rec.residuals[0];
    r.res_rtphi.max(r.res_rrphi).max(r.res_rthetaphi).max(r.res_closed)
}

#[test]
fn evolved_residuals_converge_at_second_order() {
    let (a, b) = (evolved_residuals(0.2), evolved_residuals(0.1));
    let p = (a / b).log2();
    assert!((1.8..=2.2).contains(&p), "observed order {p} ({a:.3e}, {b:.3e})");
}

#[test]
fn gamma_reconstruction_matches_the_integrated_gamma() {
    let t = table(-40.0, 40.0, 0.1);
    let slice = consistent_initial_data(&t, 2, &bump(1.0, 0.0, 2.0), &bump(0.5, 2.0, 2.0)).unwrap();
    let mut ev = coupled_evolver(&t, Scheme::Second, &slice).unwrap();
    let dt = 0.05;
    let times: Vec<f64> = (0..=100).map(|k| k as f64 * dt).collect();
    let mut rec = SnapshotRecorder::new(times, dt, 2);
    ev.run(5.0, dt, &mut [&mut rec as &mut dyn Observer]).unwrap();
    let snaps = rec.into_snapshots();
    let g = reconstruct_gamma(&t, &snaps, 0, &slice.g).unwrap();
    let last = g.last().unwrap();
    let live = ev.gamma.as_ref().unwrap();
    let scale = live.g.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let err = last.iter().zip(&live.g).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(err <= 1e-2 * scale, "{err:.3e} against {scale:.3e}");

    let sparse: Vec<FlatSnapshot> = snaps.iter().step_by(10).cloned().collect();
    assert!(matches!(reconstruct_gamma(&t, &sparse, 0, &slice.g), Err(LabError::Sparse(_))));
}

#[test]
fn static_basis_solves_the_l1_equation() {
    for m in [0.5, 1.0, 3.0] {
        let check = beta1_ode_check(&Schwarzschild::new(m).unwrap());
        assert!(check.first_branch <= 1e-8, "{check:?}");
        assert!(check.second_branch <= 1e-8, "{check:?}");
        assert!(check.sum <= 1e-8, "{check:?}");
    }
}

#[test]
fn normalization_rejects_the_growing_branch() {
    let bg = unit();
    let t = table(-20.0, 200.0, 0.5);
    let beta: Vec<f64> = t.points.iter().map(|p| 3.0 / (p.r * p.r) + 0.5 * beta1_second_branch(&bg, p)).collect();
    assert!(matches!(normalize_kerr(&bg, &t.points, &beta), Err(LabError::NotAsymptoticallyFlat { .. })));
    assert!(normalize_kerr(&bg, &t.points, &beta[1..]).is_err());
    let (fit, out) = normalize_kerr(&bg, &t.points, &vec![0.0; t.grid.n]).unwrap();
    assert_eq!(fit.a1, 0.0);
    assert!(out.iter().all(|v| *v == 0.0));
}

#[test]
fn discretely_static_data_does_not_drift() {
    let t = table(-40.0, 60.0, 0.2);
    let mut slice = consistent_initial_data(&t, 1, &Profile::Zero, &Profile::StaticBeta1 { c1: 3.0 }).unwrap();
    make_discretely_static(&t, Scheme::Second, &mut slice).unwrap();
    let mut ev = coupled_evolver(&t, Scheme::Second, &slice).unwrap();
    let mut rec = SnapshotRecorder::new(vec![0.0, 10.0, 20.0], 0.1, 2);
    ev.run(20.0, 0.1, &mut [&mut rec as &mut dyn Observer]).unwrap();
    let snaps = rec.into_snapshots();
    let drift = verify_beta1_static(&snaps, 1);
    assert!(drift <= 1e-12, "drift {drift:.3e}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn normalization_is_idempotent(c1 in -10.0f64..10.0, m in 0.5f64..3.0) {
        let bg = Schwarzschild::new(m).unwrap();
        let t = RadialTable::new(&bg, Grid::new(-20.0 * m, 150.0 * m, 0.5 * m).unwrap());
        let beta: Vec<f64> = t.points.iter().map(|p| c1 / (p.r * p.r)).collect();
        let (fit, normalized) = normalize_kerr(&bg, &t.points, &beta).unwrap();
        prop_assert!((fit.a1 - c1 / (6.0 * m)).abs() <= 1e-10 * (1.0 + c1.abs()));
        prop_assert!(fit.normalized_max <= 1e-10 * (1.0 + c1.abs()));
        let (again, _) = normalize_kerr(&bg, &t.points, &normalized).unwrap();
        prop_assert!(again.a1.abs() <= 1e-12);
    }
}
