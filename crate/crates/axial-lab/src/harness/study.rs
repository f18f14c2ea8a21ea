//! In-memory runs behind every subcommand. Nothing here touches the disk.

use super::config::{FieldKind, ModeConfig, RunConfig};
use crate::axial::{coupled_evolver, consistent_initial_data, ResidualRecorder, Residuals};
use crate::energy::{
    complete, flux_through_graph, graph_slice, initial_energies, sigma_heights, sup_abs, t_energy, tilde_heights,
    z_energy, BulkReport, GraphSlice, InitialEnergies, ModeParams, MorawetzObserver, Multiplier, RedshiftSpec,
};
use crate::error::{LabError, Result};
use crate::evolution::{
    reduced_potential, Evolver, FlatSnapshot, InitialData, Observer, RadialTable, Scheme, SliceCapture, SlicePoint,
    SnapshotRecorder, Source, Wave,
};
use crate::geometry::{build_foliation, FoliationSpec, Schwarzschild};
use crate::harmonics::ModeIndex;
use serde::Serialize;

/// Derivative order used for `f_{r*}` in energies and fluxes.
const FLUX_ORDER: u32 = 8;

/// One row of `energies.csv`. Slice energies that the run could not
/// resolve are left empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyRow {
    pub tau: f64,
    pub ell: u32,
    #[serde(rename = "E_T")]
    pub e_t: Option<f64>,
    #[serde(rename = "E_N_sigma")]
    pub e_n_sigma: Option<f64>,
    #[serde(rename = "E_N_tilde")]
    pub e_n_tilde: Option<f64>,
    #[serde(rename = "E_Z")]
    pub e_z: Option<f64>,
    #[serde(rename = "E_Zw")]
    pub e_zw: Option<f64>,
    pub sup_abs_f: Option<f64>,
    #[serde(rename = "tau2_EN")]
    pub tau2_en: Option<f64>,
    pub tau_sup: Option<f64>,
    pub field: &'static str,
}

/// One row of `bulk.csv`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BulkRow {
    pub ell: u32,
    pub field: &'static str,
    pub report: BulkReport,
}

/// What a mode run should measure.
#[derive(Debug, Clone, Default)]
pub struct Plan {
    /// Slice times `τ`; flat energies are taken at `t = τ`.
    pub taus: Vec<f64>,
    /// Capture `Σ_τ` and `Σ̃_τ` fluxes (needs a backward pass).
    pub graph_slices: bool,
    pub morawetz_windows: Vec<f64>,
    /// Keep the flat snapshots (trajectory output).
    pub keep_snapshots: bool,
    /// Derivative order for the constraint residuals.
    pub residual_order: u32,
}

/// Everything measured in one run of one mode at one resolution.
#[derive(Debug, Clone)]
pub struct ModeRun {
    pub mode: ModeConfig,
    pub h: f64,
    pub dt: f64,
    pub energies: Vec<EnergyRow>,
    pub bulk: Vec<BulkRow>,
    pub residuals: Vec<Residuals>,
    pub initial: Vec<(&'static str, Option<InitialEnergies>)>,
    pub snapshots: Vec<FlatSnapshot>,
    /// `r*` extents of the `Σ̃_τ` pieces used, per `τ`.
    pub tilde_extent: Vec<(f64, f64, f64)>,
}

/// Shared, mode-independent inputs.
#[derive(Debug, Clone)]
pub struct Context {
    pub bg: Schwarzschild,
    pub scheme: Scheme,
    pub redshift: RedshiftSpec,
    pub a_min: f64,
}

impl Context {
    pub fn new(cfg: &RunConfig, redshift: RedshiftSpec) -> Result<Self> {
        Ok(Self { bg: cfg.background()?, scheme: cfg.scheme()?, redshift, a_min: cfg.foliation.a_min })
    }
}

fn field_name(s: Source) -> &'static str {
    match s {
        Source::Alpha => "alpha",
        Source::Beta => "beta",
    }
}

/// Builds the evolver for a mode at `t = 0`.
pub fn initial_evolver<'a>(table: &'a RadialTable, scheme: Scheme, mode: &ModeConfig) -> Result<Evolver<'a>> {
    match mode.field {
        FieldKind::Coupled => {
            let slice = consistent_initial_data(table, mode.l, &mode.alpha, &mode.beta)?;
            coupled_evolver(table, scheme, &slice)
        }
        FieldKind::Alpha | FieldKind::Beta => {
            let source = mode.sources()[0];
            let index = ModeIndex::new(source.spin(), mode.l)?;
            let data = InitialData { f: mode.f.clone(), f_t: mode.f_t.clone() };
            let field = data.make(table, index, source)?;
            let pot = reduced_potential(table, index, source)?;
            let (u, v) = field.to_wave(table);
            Evolver::new(table, scheme, vec![Wave::new(u, v, pot.values)], None, 0.0)
        }
    }
}

/// `(wave index, params)` for every wave whose mode exists.
fn wave_params(mode: &ModeConfig) -> Vec<(usize, ModeParams)> {
    mode.sources()
        .into_iter()
        .enumerate()
        .filter_map(|(k, s)| {
            let idx = ModeIndex::new(s.spin(), mode.l).ok()?;
            ModeParams::new(idx, s).ok().map(|p| (k, p))
        })
        .collect()
}

fn guard(scheme: Scheme) -> usize {
    4 * scheme.half_width() + 8
}

/// First node a graph slice may use on the horizon side.
fn inner_node(table: &RadialTable, a_min: f64, guard: usize) -> usize {
    (guard..table.grid.n).find(|&j| table.points[j].a >= a_min).unwrap_or(table.grid.n)
}

/// Earliest time any `Σ_τ` with `τ ≥ 0` reaches on the grid.
fn back_time(heights: &[(f64, f64)]) -> f64 {
    heights.iter().map(|h| h.0).fold(0.0, f64::min) - 1.0
}

struct SliceSet {
    sigma: Vec<Option<GraphSlice>>,
    tilde: Vec<Option<GraphSlice>>,
}

impl SliceSet {
    fn targets(&self) -> Vec<Vec<(usize, f64)>> {
        self.sigma.iter().chain(&self.tilde).map(|s| s.as_ref().map(|g| g.targets()).unwrap_or_default()).collect()
    }
}

fn merge(a: &mut [Vec<Option<SlicePoint>>], b: &[Vec<Option<SlicePoint>>]) {
    for (sa, sb) in a.iter_mut().zip(b) {
        for (pa, pb) in sa.iter_mut().zip(sb) {
            if pa.is_none() {
                *pa = *pb;
            }
        }
    }
}

fn captures(waves: &[(usize, ModeParams)], targets: &[Vec<(usize, f64)>]) -> Vec<SliceCapture> {
    waves.iter().map(|(k, _)| SliceCapture::new(*k, FLUX_ORDER, targets)).collect()
}

/// Runs one mode at spacing `h` and measures what the plan asks for.
pub fn run_mode(cfg: &RunConfig, ctx: &Context, mode: &ModeConfig, h: f64, plan: &Plan) -> Result<ModeRun> {
    let table = RadialTable::new(&ctx.bg, cfg.grid_with(h)?);
    let dt = cfg.dt_for(h);
    let t_final = cfg.time.t_final;
    let waves = wave_params(mode);
    let g = guard(ctx.scheme);

    let sigma_h = sigma_heights(&table);
    let t_back = back_time(&sigma_h);
    let foliation: Option<FoliationSpec> = if plan.graph_slices {
        Some(build_foliation(&ctx.bg, table.grid.r_star_min, table.grid.r_star_max(), h)?)
    } else {
        None
    };
    let inner = inner_node(&table, ctx.a_min, g);
    let outer = table.grid.n - g - 1;
    let slices = if let Some(fol) = &foliation {
        let tilde_h = tilde_heights(&table, fol);
        let range = (t_back, t_final);
        let keep_sigma = |s: Option<GraphSlice>| {
            s.filter(|s| s.nodes.first() == Some(&inner) && s.nodes.last() == Some(&outer))
        };
        let keep_tilde = |s: Option<GraphSlice>| s.filter(|s| s.nodes.first() == Some(&inner));
        SliceSet {
            sigma: plan.taus.iter().map(|&tau| keep_sigma(graph_slice(&table, tau, &sigma_h, range, ctx.a_min, g))).collect(),
            tilde: plan.taus.iter().map(|&tau| keep_tilde(graph_slice(&table, tau, &tilde_h, range, ctx.a_min, g))).collect(),
        }
    } else {
        SliceSet { sigma: vec![None; plan.taus.len()], tilde: vec![None; plan.taus.len()] }
    };
    let targets = slices.targets();

    let flat_times: Vec<f64> = plan.taus.iter().cloned().filter(|t| *t >= 0.0 && *t <= t_final + 1e-9).collect();
    let mut snaps_rec = SnapshotRecorder::new(flat_times.clone(), dt, FLUX_ORDER);
    let mut caps = captures(&waves, &targets);
    // The centred difference for γ_t needs steps on both sides.
    let residual_times: Vec<f64> = if mode.field == FieldKind::Coupled && mode.l >= 2 {
        flat_times.iter().cloned().filter(|t| *t > 0.0 && *t < t_final - 3.0 * dt).collect()
    } else {
        Vec::new()
    };
    let mut res_rec = ResidualRecorder::new(mode.l, residual_times, plan.residual_order.max(2));

    // E^T(0) per wave feeds the Morawetz ratios, so take it before the run.
    let mut ev = initial_evolver(&table, ctx.scheme, mode)?;
    let snap0 = FlatSnapshot::take(&ev, FLUX_ORDER);
    let et0: Vec<f64> = waves.iter().map(|(k, p)| t_energy(&table, p, &snap0.waves[*k])).collect();
    let mut bulk_obs: Vec<MorawetzObserver> = waves
        .iter()
        .zip(&et0)
        .filter(|((_, p), _)| !(p.source == Source::Beta && p.mode.l < 2))
        .map(|((k, p), e)| {
            let w = plan.morawetz_windows.iter().cloned().filter(|w| *w <= t_final + 1e-9).collect();
            MorawetzObserver::new(*p, *k, FLUX_ORDER, *e, w)
        })
        .collect();
    {
        let mut obs: Vec<&mut dyn Observer> = vec![&mut snaps_rec, &mut res_rec];
        for c in caps.iter_mut() {
            obs.push(c);
        }
        for b in bulk_obs.iter_mut() {
            obs.push(b);
        }
        ev.run(t_final, dt, &mut obs)?;
    }
    if plan.graph_slices {
        let mut back = initial_evolver(&table, ctx.scheme, mode)?;
        let mut back_caps = captures(&waves, &targets);
        let mut obs: Vec<&mut dyn Observer> = back_caps.iter_mut().map(|c| c as &mut dyn Observer).collect();
        back.run(t_back, dt, &mut obs)?;
        for (c, b) in caps.iter_mut().zip(&back_caps) {
            merge(&mut c.slices, &b.slices);
        }
    }
    let snapshots = snaps_rec.into_snapshots();

    let mut initial = Vec::new();
    for (k, p) in &waves {
        let e = initial_energies(&table, p, &snap0.waves[*k], &ctx.redshift);
        let e = match e {
            Ok(e) => Some(e),
            Err(LabError::Divergent { .. }) => None,
            Err(e) => return Err(e),
        };
        initial.push((field_name(p.source), e));
    }

    let n_tau = plan.taus.len();
    let mut energies = Vec::new();
    let mut tilde_extent = Vec::new();
    for (w, (k, p)) in waves.iter().enumerate() {
        let init = initial[w].1;
        for (i, &tau) in plan.taus.iter().enumerate() {
            let flat = snapshots.iter().find(|s| (s.t - tau).abs() <= 0.5 * dt * (1.0 + 1e-9));
            let (e_t, e_z, e_zw) = match flat {
                Some(s) => {
                    let wv = &s.waves[*k];
                    (
                        Some(t_energy(&table, p, wv)),
                        Some(z_energy(&table, p, wv, s.t, false)),
                        Some(z_energy(&table, p, wv, s.t, true)),
                    )
                }
                None => (None, None, None),
            };
            let flux = |slot: usize, s: &Option<GraphSlice>| -> Result<Option<(f64, Vec<SlicePoint>)>> {
                let Some(gs) = s else { return Ok(None) };
                let Ok(points) = complete(&caps[w].slices[slot]) else { return Ok(None) };
                let e = flux_through_graph(&table, p, &points, &gs.slopes, Multiplier::N(&ctx.redshift))?;
                Ok(Some((e, points)))
            };
            let sig = flux(i, &slices.sigma[i])?;
            let til = flux(n_tau + i, &slices.tilde[i])?;
            if w == 0 {
                if let Some(gs) = &slices.tilde[i] {
                    let (a, b) = gs.extent(&table);
                    tilde_extent.push((tau, a, b));
                }
            }
            let sup = til.as_ref().map(|(_, pts)| sup_abs(pts));
            let e_n_tilde = til.as_ref().map(|(e, _)| *e);
            let tau2_en = match (e_n_tilde, init) {
                (Some(e), Some(i0)) if i0.e1 > 0.0 => Some(tau * tau * e / i0.e1),
                _ => None,
            };
            let tau_sup = match (sup, init) {
                (Some(s), Some(i0)) if i0.e2 > 0.0 => Some(tau * s / i0.e2.sqrt()),
                _ => None,
            };
            energies.push(EnergyRow {
                tau,
                ell: mode.l,
                e_t,
                e_n_sigma: sig.map(|(e, _)| e),
                e_n_tilde,
                e_z,
                e_zw,
                sup_abs_f: sup,
                tau2_en,
                tau_sup,
                field: field_name(p.source),
            });
        }
    }

    let mut bulk = Vec::new();
    for b in bulk_obs {
        let field = field_name(b.params().source);
        bulk.extend(b.reports.iter().map(|r| BulkRow { ell: mode.l, field, report: *r }));
    }

    Ok(ModeRun {
        mode: mode.clone(),
        h,
        dt,
        energies,
        bulk,
        residuals: res_rec.residuals,
        initial,
        snapshots: if plan.keep_snapshots { snapshots } else { Vec::new() },
        tilde_extent,
    })
}

/// `max` over the second half of `[a, b]` against `max` over the first half
/// of a sampled curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HalfComparison {
    pub first_half_max: f64,
    pub last_half_max: f64,
    pub pass: bool,
}

pub fn compare_halves(samples: &[(f64, f64)], a: f64, b: f64) -> Option<HalfComparison> {
    let mid = 0.5 * (a + b);
    let inside: Vec<&(f64, f64)> = samples.iter().filter(|(t, v)| *t >= a && *t <= b && v.is_finite()).collect();
    let first = inside.iter().filter(|(t, _)| *t <= mid).map(|(_, v)| *v).fold(f64::NEG_INFINITY, f64::max);
    let last = inside.iter().filter(|(t, _)| *t > mid).map(|(_, v)| *v).fold(f64::NEG_INFINITY, f64::max);
    if !first.is_finite() || !last.is_finite() {
        return None;
    }
    Some(HalfComparison { first_half_max: first, last_half_max: last, pass: last <= first })
}

/// Samples `(τ, value)` of one field from energy rows.
pub fn column(rows: &[EnergyRow], field: &str, pick: impl Fn(&EnergyRow) -> Option<f64>) -> Vec<(f64, f64)> {
    rows.iter().filter(|r| r.field == field).filter_map(|r| pick(r).map(|v| (r.tau, v))).collect()
}
