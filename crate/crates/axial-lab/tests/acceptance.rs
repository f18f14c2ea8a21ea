//! Acceptance criteria for the lab. Prints one PASS/FAIL line per criterion
//! and exits nonzero when any of them fails.

use axial_lab::energy::{z_energy, z_energy_decomposed, ModeParams};
use axial_lab::evolution::{BumpProfile, Profile, RadialTable};
use axial_lab::harmonics::{poincare_constant, ModeIndex, SphereGrid};
use axial_lab::harness::run::{self, DecayResult, FieldVerdict, OrderRow};
use axial_lab::harness::{FieldKind, ModeConfig, RunConfig, StudyKind};
use axial_lab::identities::{run_all, Quoted};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::time::Instant;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }

    fn error(e: impl std::fmt::Display) -> Self {
        Self { pass: false, detail: format!("error: {e}") }
    }
}

fn bump(amplitude: f64, center: f64, width: f64) -> Profile {
    Profile::GaussianBump(BumpProfile { amplitude, center, width })
}

fn single(field: FieldKind, l: u32, f: Profile) -> ModeConfig {
    ModeConfig { field, l, f, f_t: Profile::Zero, alpha: Profile::Zero, beta: Profile::Zero }
}

fn coupled(l: u32, alpha: Profile, beta: Profile) -> ModeConfig {
    ModeConfig { field: FieldKind::Coupled, l, f: Profile::Zero, f_t: Profile::Zero, alpha, beta }
}

/// Both fields at `ℓ = 2` with compactly supported bumps.
fn bump_modes() -> Vec<ModeConfig> {
    vec![single(FieldKind::Alpha, 2, bump(1.0, 10.0, 2.0)), single(FieldKind::Beta, 2, bump(1.0, 10.0, 2.0))]
}

fn in_band(order: Option<f64>, lo: f64, hi: f64) -> bool {
    order.map_or(false, |p| (lo..=hi).contains(&p))
}

fn fmt_orders(row: &OrderRow) -> String {
    let o: Vec<String> = row.orders.iter().map(|p| p.map_or("N/A".into(), |p| format!("{p:.3}"))).collect();
    format!("{}/{}/{} [{}]", row.mode, row.field, row.quantity, o.join(", "))
}

fn identities() -> Outcome {
    let start = Instant::now();
    let quoted = Quoted::default();
    let anchors = quoted.base == [-534, -244, 304, 118, -105, 16]
        && quoted.post == [-534, -172, 400, 102, -137, 24]
        && quoted.poincare == (2, 5);
    let report = run_all(&quoted);
    let secs = start.elapsed().as_secs_f64();
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
    Outcome::new(
        anchors && report.all_pass && secs < 10.0,
        format!("{} checks, failed {:?}, {:.3} s", report.checks.len(), failed, secs),
    )
}

fn spectral() -> Outcome {
    let start = Instant::now();
    let l_max = 8;
    let sphere = SphereGrid::for_lmax(l_max);
    let mut worst_eigen = 0.0_f64;
    for s in 1..=2 {
        for l in s..=l_max {
            let mode = ModeIndex::new(s, l).expect("valid mode");
            let y = sphere.harmonic(s, l).expect("harmonic");
            let lap = sphere.angular_laplacian(s, &y);
            let diff: Vec<f64> = lap.iter().zip(&y).map(|(a, b)| a - mode.eigenvalue() * b).collect();
            worst_eigen = worst_eigen.max(sphere.norm(&diff, s) / sphere.norm(&y, s));
        }
    }
    let y11 = sphere.harmonic(1, 1).expect("harmonic");
    let raised = sphere.norm(&sphere.eth_raise(1, &y11).expect("regular"), 2);

    let mut rng = StdRng::seed_from_u64(7);
    let mut worst_adjoint = 0.0_f64;
    for s in 0..=1 {
        for _ in 0..20 {
            let cf: Vec<f64> = (s..=l_max).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let cg: Vec<f64> = (s + 1..=l_max).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let f = if s == 0 { legendre_sum(&sphere, &cf) } else { sphere.reconstruct(&cf, s).expect("band-limited") };
            let g = sphere.reconstruct(&cg, s + 1).expect("band-limited");
            let lhs = sphere.dot(&sphere.eth_raise(s, &f).expect("regular"), &g, s + 1);
            let rhs = -sphere.dot(&f, &sphere.eth_lower(s + 1, &g).expect("regular"), s);
            worst_adjoint = worst_adjoint.max((lhs - rhs).abs() / (1.0 + lhs.abs()));
        }
    }
    let p2 = poincare_constant(2, 2);
    let p1 = poincare_constant(1, 2);
    let secs = start.elapsed().as_secs_f64();
    Outcome::new(
        worst_eigen <= 1e-8 && raised <= 1e-10 && worst_adjoint <= 1e-8 && p2 == 2 && p1 == 5 && secs < 30.0,
        format!(
            "eigen {worst_eigen:.1e}, |raise Y_1,1| {raised:.1e}, adjoint {worst_adjoint:.1e}, poincare ({p2}, {p1}), {secs:.2} s"
        ),
    )
}

fn legendre_sum(sphere: &SphereGrid, c: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; sphere.len()];
    for (l, c) in c.iter().enumerate() {
        let y = sphere.harmonic(0, l as u32).expect("harmonic");
        out.iter_mut().zip(&y).for_each(|(o, v)| *o += c * v);
    }
    out
}

fn conservation() -> Outcome {
    let start = Instant::now();
    let mut cfg = RunConfig::baseline(StudyKind::Converge);
    cfg.modes = vec![
        single(FieldKind::Alpha, 2, bump(1.0, 10.0, 2.0)),
        coupled(2, bump(1.0, 10.0, 2.0), bump(0.5, 0.0, 3.0)),
    ];
    let result = match run::converge(&cfg) {
        Ok(r) => r,
        Err(e) => return Outcome::error(e),
    };
    let at = |row: &OrderRow, h: f64| row.h.iter().position(|x| *x == h).map(|k| row.values[k]);
    let mut bad = Vec::new();
    let mut max_drift = 0.0_f64;
    let mut saw_residuals = false;
    for row in &result.rows {
        match row.quantity.as_str() {
            "E_T_drift" => {
                let d = at(row, 0.1).unwrap_or(f64::INFINITY);
                max_drift = max_drift.max(d);
                if d > 1e-3 || !row.orders.iter().all(|p| in_band(*p, 1.8, 2.2)) {
                    bad.push(fmt_orders(row));
                }
            }
            q if q.starts_with("res_") => {
                saw_residuals = true;
                if !row.orders.iter().all(|p| in_band(*p, 1.8, 2.2)) {
                    bad.push(fmt_orders(row));
                }
            }
            _ => {}
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome::new(
        bad.is_empty() && saw_residuals && secs < 900.0,
        format!("max drift at h = 0.1: {max_drift:.2e}; off-order rows {bad:?}; {secs:.1} s"),
    )
}

fn decay_run() -> Result<DecayResult, String> {
    let mut cfg = RunConfig::baseline(StudyKind::Decay);
    cfg.modes = bump_modes();
    run::decay(&cfg).map_err(|e| e.to_string())
}

fn verdicts(decay: &Result<DecayResult, String>) -> Result<&[FieldVerdict], Outcome> {
    match decay {
        Ok(d) => Ok(&d.verdicts),
        Err(e) => Err(Outcome::error(e)),
    }
}

fn boundedness(decay: &Result<DecayResult, String>) -> Outcome {
    let v = match verdicts(decay) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let ratios: Vec<String> = v.iter().map(|v| format!("{}: {:.4}", v.mode, v.bound_ratio.unwrap_or(f64::NAN))).collect();
    let pass = v.len() == 2 && v.iter().all(|v| v.bound_ratio.map_or(false, |r| r <= run::BOUNDEDNESS_RATIO));
    Outcome::new(pass, format!("sup E^N(Sigma_tau)/E^N(Sigma_0): {}", ratios.join(", ")))
}

fn morawetz(decay: &Result<DecayResult, String>) -> Outcome {
    let v = match verdicts(decay) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let mut pass = v.len() == 2;
    let mut parts = Vec::new();
    for f in v {
        let g = f.morawetz_growth.iter().find(|g| g.0 == 200.0 && g.1 == 400.0).map(|g| g.2);
        let d = f.morawetz_min_density;
        pass &= g.map_or(false, |g| g <= run::MORAWETZ_GROWTH) && d.map_or(false, |d| d >= 0.0);
        parts.push(format!("{}: growth {:.4}, min density {:.2e}", f.mode, g.unwrap_or(f64::NAN), d.unwrap_or(f64::NAN)));
    }
    Outcome::new(pass, parts.join("; "))
}

fn z_machinery(decay: &Result<DecayResult, String>) -> Outcome {
    let v = match verdicts(decay) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let mut cfg = RunConfig::baseline(StudyKind::Evolve);
    cfg.modes = bump_modes();
    let evolved = match run::evolve(&cfg) {
        Ok(r) => r,
        Err(e) => return Outcome::error(e),
    };
    let mut worst = 0.0_f64;
    for r in &evolved.runs {
        let table = RadialTable::new(&cfg.background().expect("mass"), cfg.grid_with(r.h).expect("grid"));
        for (w, source) in r.mode.sources().into_iter().enumerate() {
            let params = ModeParams::new(ModeIndex::new(source.spin(), r.mode.l).expect("mode"), source).expect("params");
            for s in &r.snapshots {
                let direct = z_energy(&table, &params, &s.waves[w], s.t, true);
                let split = z_energy_decomposed(&table, &params, &s.waves[w], s.t);
                worst = worst.max((direct - split).abs() / direct.abs().max(f64::MIN_POSITIVE));
            }
        }
    }
    let mut pass = v.len() == 2 && worst <= 1e-6;
    let mut parts = vec![format!("decomposed vs direct {worst:.2e}")];
    for f in v {
        let c = f.z_ratio_min.unwrap_or(f64::NAN);
        let halves = f.z_halves.map_or(false, |h| h.pass);
        pass &= c > 0.0 && halves;
        parts.push(format!("{}: c = {c:.4}, non-growing {halves}", f.mode));
    }
    Outcome::new(pass, parts.join("; "))
}

fn decay(decay: &Result<DecayResult, String>) -> Outcome {
    let v = match verdicts(decay) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let mut pass = v.len() == 2;
    let mut parts = Vec::new();
    for f in v {
        let (e, p) = (f.decay_energy, f.decay_pointwise);
        pass &= e.map_or(false, |c| c.pass) && p.map_or(false, |c| c.pass);
        let show = |c: Option<axial_lab::harness::study::HalfComparison>| {
            c.map_or("N/A".to_string(), |c| format!("{:.2e} -> {:.2e}", c.first_half_max, c.last_half_max))
        };
        parts.push(format!("{}: tau^2 E^N/E1 {}, tau sup|f|/sqrt(E2) {}", f.mode, show(e), show(p)));
    }
    Outcome::new(pass, parts.join("; "))
}

fn kerr() -> Outcome {
    let mut cfg = RunConfig::baseline(StudyKind::NormalizeKerr);
    let m = cfg.mass;
    cfg.kerr.c1 = 3.0 * m.powi(3);
    cfg.kerr.c2 = 0.0;
    let flat = match run::kerr(&cfg) {
        Ok(r) => r,
        Err(e) => return Outcome::error(e),
    };
    let mut bent = cfg.clone();
    bent.kerr.c2 = 0.5;
    let rejected = match run::kerr(&bent) {
        Ok(r) => r.fit.is_none() && r.rejection.is_some(),
        Err(e) => return Outcome::error(e),
    };
    let Some(fit) = flat.fit else {
        return Outcome::new(false, format!("flat data rejected: {:?}", flat.rejection));
    };
    let a1_err = (fit.a1 - cfg.kerr.c1 / (6.0 * m)).abs();
    let orders_ok = flat.drift.orders.iter().all(|p| in_band(*p, 1.8, 2.2));
    Outcome::new(
        a1_err <= 1e-10 && fit.normalized_max <= 1e-10 && rejected && orders_ok,
        format!(
            "a1 error {a1_err:.1e}, normalized {:.1e}, C2 rejected {rejected}, static drift {}",
            fit.normalized_max,
            fmt_orders(&flat.drift)
        ),
    )
}

fn redshift() -> Outcome {
    let cfg = RunConfig::baseline(StudyKind::Verify);
    match run::redshift(&cfg) {
        Ok(c) => {
            let rel = ((c.c_doubled - c.c) / c.c).abs();
            Outcome::new(
                c.c > 0.0 && c.stable && rel <= 0.1 && c.r0 == 3.0 && c.big_r0 == 10.0,
                format!("delta = ({}, {}), c = {:.3e}, doubled {:.3e} ({rel:.1e}), C = {:.3}", c.delta1, c.delta2, c.c, c.c_doubled, c.big_c),
            )
        }
        Err(e) => Outcome::error(e),
    }
}

fn main() {
    let mut failed = 0;
    let mut report = |name: &str, f: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let o = f();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("{verdict} {name}: {} [{:.1} s]", o.detail, start.elapsed().as_secs_f64());
        if !o.pass {
            failed += 1;
        }
    };
    report("exact identities", &identities);
    report("spectral suite", &spectral);
    report("conservation and convergence", &conservation);
    let decay_result = decay_run();
    report("boundedness", &|| boundedness(&decay_result));
    report("morawetz", &|| morawetz(&decay_result));
    report("z machinery", &|| z_machinery(&decay_result));
    report("decay", &|| decay(&decay_result));
    report("kerr normalization", &kerr);
    report("red-shift certification", &redshift);
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
