//! The five studies. Each returns its measurements and an overall verdict;
//! [`super::output`] turns them into files.

use super::config::RunConfig;
use super::study::{column, compare_halves, run_mode, Context, HalfComparison, ModeRun, Plan};
use crate::axial::{
    beta1_second_branch, consistent_initial_data, coupled_evolver, make_discretely_static, normalize_kerr,
    verify_beta1_static, KerrFit,
};
use crate::energy::{build_redshift, RedshiftCertificate, RedshiftParams};
use crate::error::{LabError, Result};
use crate::evolution::{Profile, RadialTable, SnapshotRecorder};
use crate::identities::{run_all, IdentityReport, Quoted};
use rayon::prelude::*;
use serde::Serialize;

/// Upper bound on `sup_τ E^N(Σ_τ)/E^N(Σ₀)` treated as bounded.
pub const BOUNDEDNESS_RATIO: f64 = 2.0;
/// Largest relative growth of the Morawetz LHS when the window doubles.
pub const MORAWETZ_GROWTH: f64 = 0.05;

pub fn redshift(cfg: &RunConfig) -> Result<RedshiftCertificate> {
    let bg = cfg.background()?;
    build_redshift(&bg, &RedshiftParams::standard(&bg))
}

fn taus(step: f64, end: f64) -> Vec<f64> {
    let n = (end / step + 1e-9).floor() as usize;
    (0..=n).map(|i| i as f64 * step).collect()
}

fn run_modes(cfg: &RunConfig, ctx: &Context, plan: &Plan) -> Result<Vec<ModeRun>> {
    cfg.modes.par_iter().map(|m| run_mode(cfg, ctx, m, cfg.grid.h, plan)).collect()
}

#[derive(Debug, Clone)]
pub struct EvolveResult {
    pub certificate: RedshiftCertificate,
    pub runs: Vec<ModeRun>,
}

pub fn evolve(cfg: &RunConfig) -> Result<EvolveResult> {
    let certificate = redshift(cfg)?;
    let ctx = Context::new(cfg, certificate.spec())?;
    let plan = Plan {
        taus: taus(cfg.time.snapshot_every, cfg.time.t_final),
        graph_slices: true,
        morawetz_windows: cfg.morawetz.windows.clone(),
        keep_snapshots: true,
        residual_order: cfg.scheme,
    };
    Ok(EvolveResult { runs: run_modes(cfg, &ctx, &plan)?, certificate })
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyResult {
    pub identities: IdentityReport,
    pub redshift: RedshiftCertificate,
    pub pass: bool,
}

pub fn verify(cfg: &RunConfig, quoted: &Quoted) -> Result<VerifyResult> {
    let identities = run_all(quoted);
    let redshift = redshift(cfg)?;
    let pass = identities.all_pass && redshift.c > 0.0 && redshift.stable;
    Ok(VerifyResult { identities, redshift, pass })
}

/// Verdicts for one field of one mode.
#[derive(Debug, Clone, Serialize)]
pub struct FieldVerdict {
    pub mode: String,
    pub field: &'static str,
    pub ell: u32,
    /// The lowest `β` mode is removed by the Kerr normalization, so no decay
    /// claim is made for it.
    pub excluded: bool,
    /// `sup_τ E^N(Σ_τ)/E^N(Σ₀)` over `[0, bound_tau_max]`.
    pub bound_ratio: Option<f64>,
    pub bound_halves: Option<HalfComparison>,
    pub decay_energy: Option<HalfComparison>,
    pub decay_pointwise: Option<HalfComparison>,
    /// `min_τ E^{Z,ω}/E^Z`.
    pub z_ratio_min: Option<f64>,
    pub z_halves: Option<HalfComparison>,
    /// Relative LHS growth between windows `w` and `2w`.
    pub morawetz_growth: Vec<(f64, f64, f64)>,
    pub morawetz_min_density: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct DecayResult {
    pub certificate: RedshiftCertificate,
    pub runs: Vec<ModeRun>,
    pub verdicts: Vec<FieldVerdict>,
    pub pass: bool,
}

fn zero_safe(ratio: Option<f64>, all_zero: bool) -> Option<f64> {
    if all_zero {
        Some(0.0)
    } else {
        ratio
    }
}

pub fn field_verdicts(cfg: &RunConfig, run: &ModeRun) -> Vec<FieldVerdict> {
    let f = &cfg.foliation;
    let mut fields: Vec<&'static str> = run.energies.iter().map(|r| r.field).collect();
    fields.dedup();
    fields
        .into_iter()
        .map(|field| {
            let rows: Vec<_> = run.energies.iter().filter(|r| r.field == field).cloned().collect();
            let zero = rows.iter().all(|r| r.e_t.unwrap_or(0.0) == 0.0);
            let sigma = column(&rows, field, |r| r.e_n_sigma);
            let s0 = sigma.iter().find(|(t, _)| *t == 0.0).map(|(_, v)| *v);
            let bounded: Vec<(f64, f64)> = match s0 {
                Some(e0) if e0 > 0.0 => sigma.iter().filter(|(t, _)| *t <= f.bound_tau_max).map(|(t, v)| (*t, v / e0)).collect(),
                _ => Vec::new(),
            };
            let bound_ratio = zero_safe(bounded.iter().map(|(_, v)| *v).reduce(f64::max), zero);
            let bound_halves = compare_halves(&bounded, 0.0, f.bound_tau_max);
            let decay_energy = compare_halves(&column(&rows, field, |r| r.tau2_en), f.tau_min, f.tau_max);
            let decay_pointwise = compare_halves(&column(&rows, field, |r| r.tau_sup), f.tau_min, f.tau_max);
            let z: Vec<(f64, f64)> = rows
                .iter()
                .filter_map(|r| match (r.e_z, r.e_zw) {
                    (Some(a), Some(b)) if a > 0.0 => Some((r.tau, b / a)),
                    _ => None,
                })
                .collect();
            let z_ratio_min = zero_safe(z.iter().map(|(_, v)| *v).reduce(f64::min), zero);
            let z_halves = compare_halves(&column(&rows, field, |r| r.e_zw), f.tau_min, cfg.time.t_final);
            let reports: Vec<_> = run.bulk.iter().filter(|b| b.field == field).map(|b| b.report).collect();
            let mut morawetz_growth = Vec::new();
            for a in &reports {
                if let Some(b) = reports.iter().find(|b| (b.window - 2.0 * a.window).abs() < 1e-9) {
                    let g = if a.lhs > 0.0 { (b.lhs - a.lhs) / a.lhs } else { 0.0 };
                    morawetz_growth.push((a.window, b.window, g));
                }
            }
            let morawetz_min_density = reports.iter().map(|r| r.min_density).reduce(f64::min);
            let excluded = run.mode.excluded_from_decay() && field == "beta";
            let ok = |c: &Option<HalfComparison>| c.map(|c| c.pass).unwrap_or(zero);
            let pass = excluded
                || (bound_ratio.map(|r| r <= BOUNDEDNESS_RATIO).unwrap_or(false)
                    && ok(&decay_energy)
                    && ok(&decay_pointwise)
                    && z_ratio_min.map(|c| c > 0.0 || zero).unwrap_or(false)
                    && morawetz_growth.iter().all(|g| g.2 <= MORAWETZ_GROWTH)
                    && morawetz_min_density.map(|d| d >= 0.0).unwrap_or(true));
            FieldVerdict {
                mode: run.mode.tag(),
                field,
                ell: run.mode.l,
                excluded,
                bound_ratio,
                bound_halves,
                decay_energy,
                decay_pointwise,
                z_ratio_min,
                z_halves,
                morawetz_growth,
                morawetz_min_density,
                pass,
            }
        })
        .collect()
}

pub fn decay(cfg: &RunConfig) -> Result<DecayResult> {
    let certificate = redshift(cfg)?;
    let ctx = Context::new(cfg, certificate.spec())?;
    let plan = Plan {
        taus: taus(cfg.foliation.tau_step, cfg.time.t_final),
        graph_slices: true,
        morawetz_windows: cfg.morawetz.windows.clone(),
        keep_snapshots: false,
        residual_order: cfg.scheme,
    };
    let runs = run_modes(cfg, &ctx, &plan)?;
    let verdicts: Vec<FieldVerdict> = runs.iter().flat_map(|r| field_verdicts(cfg, r)).collect();
    let pass = verdicts.iter().all(|v| v.pass);
    Ok(DecayResult { certificate, runs, verdicts, pass })
}

/// One measured quantity at every resolution, with the observed orders
/// `log₂(q(h)/q(h/2))` between consecutive levels.
#[derive(Debug, Clone, Serialize)]
pub struct OrderRow {
    pub mode: String,
    pub field: String,
    pub quantity: String,
    pub h: Vec<f64>,
    pub values: Vec<f64>,
    /// `None` (reported as N/A) when a value is zero or not finite.
    pub orders: Vec<Option<f64>>,
}

pub fn observed_orders(values: &[f64]) -> Vec<Option<f64>> {
    values
        .windows(2)
        .map(|w| {
            if w[0] > 0.0 && w[1] > 0.0 && w[0].is_finite() && w[1].is_finite() {
                Some((w[0] / w[1]).log2())
            } else {
                None
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct ConvergeResult {
    pub rows: Vec<OrderRow>,
    pub runs: Vec<ModeRun>,
}

fn l2_difference(coarse: &[num_complex::Complex64], fine: &[num_complex::Complex64], h: f64) -> f64 {
    let s: f64 = coarse.iter().enumerate().filter(|(j, _)| 2 * j < fine.len()).map(|(j, c)| (c - fine[2 * j]).norm_sqr()).sum();
    (s * h).sqrt()
}

pub fn converge(cfg: &RunConfig) -> Result<ConvergeResult> {
    let certificate = redshift(cfg)?;
    let ctx = Context::new(cfg, certificate.spec())?;
    let t_final = cfg.time.t_final;
    let plan = Plan {
        taus: vec![0.0, 0.5 * t_final, t_final],
        graph_slices: false,
        morawetz_windows: Vec::new(),
        keep_snapshots: true,
        residual_order: cfg.scheme,
    };
    let hs = cfg.converge.h.clone();
    let jobs: Vec<(usize, f64)> = (0..cfg.modes.len()).flat_map(|m| hs.iter().map(move |h| (m, *h))).collect();
    let runs: Vec<ModeRun> = jobs.par_iter().map(|(m, h)| run_mode(cfg, &ctx, &cfg.modes[*m], *h, &plan)).collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (m, mode) in cfg.modes.iter().enumerate() {
        let levels: Vec<&ModeRun> = runs.iter().skip(m * hs.len()).take(hs.len()).collect();
        let mut fields: Vec<&'static str> = levels[0].energies.iter().map(|r| r.field).collect();
        fields.dedup();
        for (w, field) in fields.iter().enumerate() {
            let drift: Vec<f64> = levels
                .iter()
                .map(|run| {
                    let e = column(&run.energies, field, |r| r.e_t);
                    match e.first() {
                        Some(&(_, e0)) if e0 > 0.0 => e.iter().map(|(_, v)| ((v - e0) / e0).abs()).fold(0.0, f64::max),
                        _ => 0.0,
                    }
                })
                .collect();
            rows.push(OrderRow {
                mode: mode.tag(),
                field: field.to_string(),
                quantity: "E_T_drift".into(),
                h: hs.clone(),
                orders: observed_orders(&drift),
                values: drift,
            });
            let finals: Vec<&[num_complex::Complex64]> = levels
                .iter()
                .map(|run| run.snapshots.last().map(|s| s.waves[w].f.as_slice()).unwrap_or(&[]))
                .collect();
            let diffs: Vec<f64> = (0..hs.len() - 1).map(|k| l2_difference(finals[k], finals[k + 1], hs[k])).collect();
            rows.push(OrderRow {
                mode: mode.tag(),
                field: field.to_string(),
                quantity: "solution_difference".into(),
                h: hs[..hs.len() - 1].to_vec(),
                orders: observed_orders(&diffs),
                values: diffs,
            });
        }
        if levels.iter().all(|r| !r.residuals.is_empty()) {
            let pick: [(&str, fn(&crate::axial::Residuals) -> f64); 5] = [
                ("res_Rtphi", |r| r.res_rtphi),
                ("res_Rrphi", |r| r.res_rrphi),
                ("res_Rthetaphi", |r| r.res_rthetaphi),
                ("res_closed", |r| r.res_closed),
                ("res_gamma_rstar", |r| r.res_gamma_rstar),
            ];
            for (name, get) in pick {
                let values: Vec<f64> = levels
                    .iter()
                    .map(|run| run.residuals.iter().map(get).fold(0.0, f64::max))
                    .collect();
                rows.push(OrderRow {
                    mode: mode.tag(),
                    field: "coupled".into(),
                    quantity: name.into(),
                    h: hs.clone(),
                    orders: observed_orders(&values),
                    values,
                });
            }
        }
    }
    Ok(ConvergeResult { rows, runs })
}

#[derive(Debug, Clone, Serialize)]
pub struct KerrResult {
    /// The fit, or `None` when `β₁` has a non-flat component.
    pub fit: Option<KerrFit>,
    pub rejection: Option<String>,
    /// `max |∂_t β₁|` over the run for sampled `C₁/r²` data at each spacing.
    pub drift: OrderRow,
    /// The same for data made static for the discrete Laplacian.
    pub drift_discrete: f64,
    pub pass: bool,
}

/// `max |∂_t β₁|` over `[0, t_final]` for the `ℓ = 1` coupled mode.
pub fn static_beta1_drift(cfg: &RunConfig, h: f64, discrete: bool) -> Result<f64> {
    let bg = cfg.background()?;
    let scheme = cfg.scheme()?;
    let table = RadialTable::new(&bg, cfg.grid_with(h)?);
    let mut slice = consistent_initial_data(&table, 1, &Profile::Zero, &Profile::StaticBeta1 { c1: cfg.kerr.c1 })?;
    if discrete {
        make_discretely_static(&table, scheme, &mut slice)?;
    }
    let mut ev = coupled_evolver(&table, scheme, &slice)?;
    let dt = cfg.dt_for(h);
    let times = taus(cfg.time.snapshot_every, cfg.time.t_final);
    let mut rec = SnapshotRecorder::new(times, dt, 8);
    ev.run(cfg.time.t_final, dt, &mut [&mut rec])?;
    Ok(verify_beta1_static(&rec.into_snapshots(), 1))
}

pub fn kerr(cfg: &RunConfig) -> Result<KerrResult> {
    let bg = cfg.background()?;
    let table = RadialTable::new(&bg, cfg.grid_with(cfg.grid.h)?);
    let beta1: Vec<f64> =
        table.points.iter().map(|p| cfg.kerr.c1 / (p.r * p.r) + cfg.kerr.c2 * beta1_second_branch(&bg, p)).collect();
    let (fit, rejection) = match normalize_kerr(&bg, &table.points, &beta1) {
        Ok((fit, _)) => (Some(fit), None),
        Err(e @ LabError::NotAsymptoticallyFlat { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    let hs = cfg.converge.h.clone();
    let values: Vec<f64> = hs.par_iter().map(|h| static_beta1_drift(cfg, *h, false)).collect::<Result<_>>()?;
    let drift_discrete = static_beta1_drift(cfg, cfg.grid.h, true)?;
    let drift = OrderRow {
        mode: "coupled_l1".into(),
        field: "beta".into(),
        quantity: "static_drift".into(),
        h: hs,
        orders: observed_orders(&values),
        values,
    };
    let pass = fit.is_some();
    Ok(KerrResult { fit, rejection, drift, drift_discrete, pass })
}
