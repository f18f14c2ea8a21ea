use approx::assert_relative_eq;
use axial_lab::energy::{t_energy, ModeParams};
use axial_lab::evolution::{
    d1, d2, evolve_mode, reduced_potential, reduced_potential_at, BumpProfile, Evolver, FlatSnapshot, Grid, InitialData,
    ModeField, Profile, RadialTable, Scheme, Source, Wave,
};
use axial_lab::geometry::Schwarzschild;
use axial_lab::harmonics::ModeIndex;
use axial_lab::LabError;
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

fn alpha_field(table: &RadialTable, l: u32, f: Profile) -> ModeField {
    InitialData { f, f_t: Profile::Zero }.make(table, ModeIndex::new(2, l).unwrap(), Source::Alpha).unwrap()
}

fn final_snapshot(table: &RadialTable, field: &ModeField, scheme: Scheme, t: f64, dt: f64) -> FlatSnapshot {
    evolve_mode(table, field, scheme, t, dt, &[t]).unwrap().pop().unwrap()
}

#[test]
fn grid_and_scheme_validation() {
    assert!(matches!(Grid::new(0.0, 0.5, 0.1), Err(LabError::Config(_))));
    assert!(matches!(Grid::new(0.0, 10.0, 0.0), Err(LabError::Config(_))));
    let g = Grid::new(-10.0, 10.0, 0.1).unwrap();
    assert_eq!(g.n, 201);
    assert_relative_eq!(g.r_star_max(), 10.0, epsilon = 1e-12);
    assert_eq!(g.nearest(0.04), 100);
    assert_eq!(g.nearest(-99.0), 0);
    assert!(matches!(Scheme::from_order(3), Err(LabError::Config(_))));
    assert_eq!(Scheme::from_order(4).unwrap().half_width(), 2);
}

#[test]
fn mismatched_spin_is_rejected() {
    let t = table(-40.0, 40.0, 0.2);
    let data = InitialData { f: bump(1.0, 0.0, 1.0), f_t: Profile::Zero };
    assert!(matches!(data.make(&t, ModeIndex::new(1, 2).unwrap(), Source::Alpha), Err(LabError::Mode { .. })));
    assert!(reduced_potential(&t, ModeIndex::new(2, 2).unwrap(), Source::Beta).is_err());
}

#[test]
fn data_too_close_to_the_ends_is_rejected() {
    let t = table(-20.0, 20.0, 0.1);
    let data = InitialData { f: bump(1.0, 10.0, 1.5), f_t: Profile::Zero };
    assert!(matches!(
        data.make(&t, ModeIndex::new(2, 2).unwrap(), Source::Alpha),
        Err(LabError::Support { .. })
    ));
}

#[test]
fn cfl_violation_is_rejected() {
    let t = table(-40.0, 40.0, 0.1);
    let field = alpha_field(&t, 2, bump(1.0, 0.0, 1.0));
    let err = evolve_mode(&t, &field, Scheme::Second, 1.0, 0.095, &[]).unwrap_err();
    assert!(matches!(err, LabError::Cfl { .. }));
}

#[test]
fn boundary_contact_is_a_hard_error() {
    let t = table(-30.0, 30.0, 0.1);
    let field = alpha_field(&t, 2, bump(1.0, 0.0, 1.0));
    match evolve_mode(&t, &field, Scheme::Second, 40.0, 0.05, &[]) {
        Err(LabError::BoundaryContact { t, .. }) => assert!(t > 10.0 && t < 30.0, "contact at {t}"),
        other => panic!("expected boundary contact, got {other:?}"),
    }
}

#[test]
fn reduced_potential_oracle() {
    // u = r f turns A f_rr + (2r − 2M)/r² f_r − (Λ/r² + P) f, multiplied by r A,
    // into u_{r*r*} − V_eff u. Checked by finite differences in r for a static f.
    let bg = unit();
    let f = |r: f64| (-r / 7.0).exp() * (1.0 + 1.0 / r);
    let u = |r: f64| r * f(r);
    for (source, s) in [(Source::Alpha, 2u32), (Source::Beta, 1u32)] {
        for l in 2..=5 {
            let lam = (l * (l + 1) - s * s) as f64;
            for r in [2.3, 3.0, 4.5, 9.0, 25.0] {
                let d = 1e-3;
                let a = bg.a(r);
                let fr = (f(r + d) - f(r - d)) / (2.0 * d);
                let frr = (f(r + d) - 2.0 * f(r) + f(r - d)) / (d * d);
                let p = bg.point(r).unwrap();
                let lhs = r * a * (a * frr + (2.0 * r - 2.0) / (r * r) * fr - (lam / (r * r) + source.potential(&bg, &p)) * f(r));
                let us = |x: f64| bg.a(x) * (u(x + d) - u(x - d)) / (2.0 * d);
                let uss = a * (us(r + d) - us(r - d)) / (2.0 * d);
                let rhs = uss - reduced_potential_at(&bg, l, &p) * u(r);
                assert_relative_eq!(lhs, rhs, epsilon = 1e-5 * (1.0 + lhs.abs()));
            }
        }
    }
}

#[test]
fn potentials_at_reference_radii() {
    // V = 4A/r², W = (1 − 8M/r)/r², V_eff = A(ℓ(ℓ+1)/r² − 6M/r³).
    let bg = unit();
    let p3 = bg.point(3.0).unwrap();
    assert_relative_eq!(Source::Alpha.potential(&bg, &p3), 4.0 / 27.0, epsilon = 1e-15);
    assert_relative_eq!(Source::Beta.potential(&bg, &bg.point(8.0).unwrap()), 0.0, epsilon = 1e-15);
    assert_relative_eq!(reduced_potential_at(&bg, 2, &p3), (6.0 / 9.0 - 6.0 / 27.0) / 3.0, epsilon = 1e-15);
    let d = 1e-5;
    for r in [2.5, 3.0, 6.0, 12.0, 40.0] {
        for s in [Source::Alpha, Source::Beta] {
            let fd = (s.potential(&bg, &bg.point(r + d).unwrap()) - s.potential(&bg, &bg.point(r - d).unwrap())) / (2.0 * d);
            assert_relative_eq!(s.potential_dr(&bg, r), fd, epsilon = 1e-9);
        }
    }
}

#[test]
fn stencils_have_their_order() {
    let err = |h: f64, order: u32, second: bool| {
        let n = (8.0 / h) as usize;
        let u: Vec<f64> = (0..n).map(|j| (j as f64 * h).sin()).collect();
        let j = n / 2;
        let x = j as f64 * h;
        if second {
            (d2(&u, j, h, order) + x.sin()).abs()
        } else {
            (d1(&u, j, h, order) - x.cos()).abs()
        }
    };
    for (order, second, expect) in [(2, false, 2.0), (4, false, 4.0), (8, false, 8.0), (2, true, 2.0), (4, true, 4.0)] {
        let h = if order == 8 { 0.2 } else { 0.05 };
        let p = (err(h, order, second) / err(h / 2.0, order, second)).log2();
        assert!((p - expect).abs() < 0.2, "order {order} second {second}: observed {p}");
    }
}

#[test]
fn finite_speed_of_propagation() {
    let t = table(-80.0, 80.0, 0.1);
    let (a, b) = (-8.0, 8.0);
    let field = alpha_field(&t, 2, bump(1.0, 0.0, 1.0));
    let time = 20.0;
    let snap = final_snapshot(&t, &field, Scheme::Second, time, 0.05);
    let peak = snap.waves[0].f.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let k = Scheme::Second.half_width() as f64;
    let outside = (0..t.grid.n)
        .filter(|&j| {
            let x = t.grid.x(j);
            x < a - time - k * t.grid.h || x > b + time + k * t.grid.h
        })
        .map(|j| snap.waves[0].f[j].norm())
        .fold(0.0, f64::max);
    assert!(outside <= 1e-12 * peak, "outside {outside:.3e}, peak {peak:.3e}");
}

#[test]
fn leapfrog_is_time_reversible() {
    let t = table(-60.0, 60.0, 0.1);
    let field = alpha_field(&t, 3, bump(1.0, 2.0, 1.5));
    let (u, v) = field.to_wave(&t);
    let pot = reduced_potential(&t, field.mode, field.source).unwrap();
    let mut ev = Evolver::new(&t, Scheme::Second, vec![Wave::new(u.clone(), v, pot.values)], None, 0.0).unwrap();
    ev.run(15.0, 0.05, &mut []).unwrap();
    ev.run(0.0, 0.05, &mut []).unwrap();
    let back = &ev.waves[0].u;
    let err = back.iter().zip(&u).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(err <= 1e-12, "reversal error {err:.3e}");
}

fn energy_drift(h: f64, scheme: Scheme) -> f64 {
    let t = table(-60.0, 60.0, h);
    let field = alpha_field(&t, 2, bump(1.0, 0.0, 1.5));
    let snaps = evolve_mode(&t, &field, scheme, 20.0, 0.5 * h, &[0.0, 20.0]).unwrap();
    let params = ModeParams::new(field.mode, field.source).unwrap();
    let e0 = t_energy(&t, &params, &snaps[0].waves[0]);
    let e1 = t_energy(&t, &params, &snaps[1].waves[0]);
    ((e1 - e0) / e0).abs()
}

#[test]
fn energy_drift_converges_at_second_order() {
    let (a, b) = (energy_drift(0.2, Scheme::Second), energy_drift(0.1, Scheme::Second));
    let p = (a / b).log2();
    assert!((1.8..=2.2).contains(&p), "observed order {p}");
    assert!(b < 1e-3);
}

#[test]
fn fourth_order_solution_converges() {
    let run = |h: f64| {
        let t = table(-40.0, 40.0, h);
        let field = alpha_field(&t, 2, bump(1.0, 0.0, 2.0));
        let snap = final_snapshot(&t, &field, Scheme::Fourth, 10.0, 0.5 * h);
        (t.grid, snap.waves[0].f.clone())
    };
    let (g1, f1) = run(0.2);
    let (_, f2) = run(0.1);
    let (_, f3) = run(0.05);
    let diff = |c: &[num_complex::Complex64], f: &[num_complex::Complex64]| {
        c.iter().enumerate().map(|(j, v)| (v - f[2 * j]).norm()).fold(0.0, f64::max)
    };
    let d1 = diff(&f1, &f2);
    let d2 = diff(&f2, &f3);
    let p = (d1 / d2).log2();
    assert!((3.6..=4.4).contains(&p), "observed order {p} on {} nodes", g1.n);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn evolution_is_linear(
        c1 in -2.0f64..2.0,
        c2 in -2.0f64..2.0,
        x1 in -5.0f64..5.0,
        x2 in -5.0f64..5.0,
    ) {
        let t = table(-40.0, 40.0, 0.2);
        let d1 = bump(1.0, x1, 1.0);
        let d2 = bump(1.0, x2, 1.5);
        let combo = Profile::CustomTable {
            points: (0..t.grid.n)
                .map(|j| {
                    let x = t.grid.x(j);
                    (x, c1 * d1.jet(&t.bg, x).v + c2 * d2.jet(&t.bg, x).v)
                })
                .collect(),
        };
        let run = |p: Profile| final_snapshot(&t, &alpha_field(&t, 2, p), Scheme::Second, 8.0, 0.1).waves[0].f.clone();
        let (s1, s2, s12) = (run(d1), run(d2), run(combo));
        let scale = s12.iter().map(|z| z.norm()).fold(1e-300, f64::max);
        for j in 0..t.grid.n {
            prop_assert!((s12[j] - (s1[j] * c1 + s2[j] * c2)).norm() <= 1e-12 * scale.max(1.0));
        }
    }

    #[test]
    fn reduced_potential_is_positive_for_l_at_least_two(rs in -200.0f64..500.0, l in 2u32..9) {
        let bg = unit();
        let p = bg.point_from_tortoise(rs);
        prop_assert!(reduced_potential_at(&bg, l, &p) > 0.0);
    }
}

#[test]
fn reduced_potential_vanishes_at_both_ends() {
    let t = table(-300.0, 300.0, 0.1);
    let v = reduced_potential(&t, ModeIndex::new(2, 2).unwrap(), Source::Alpha).unwrap().values;
    let peak = v.iter().cloned().fold(0.0, f64::max);
    assert!(v[0] < 1e-40 * peak);
    // Inverse-square tail at large r.
    let r = t.points[t.grid.n - 1].r;
    assert_relative_eq!(v[t.grid.n - 1] * r * r, 6.0, max_relative = 0.02);
}
