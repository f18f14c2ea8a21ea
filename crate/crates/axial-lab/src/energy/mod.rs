//! Energies, fluxes and bulk integrals for single modes.
//!
//! Everything is sphere-integrated: for a mode of the unit-normalized
//! harmonic the angular gradient contributes `Λ/r² |f|²` with
//! `Λ = ℓ(ℓ+1) − s²`. Densities are written per unit `r*` and already carry
//! the area factor `r²`.

mod morawetz;
mod redshift;
mod zenergy;

pub use morawetz::{base_coefficient, morawetz_density, x_f, x_f_prime, BulkReport, MorawetzObserver};
pub use redshift::{build_redshift, RedshiftCertificate, RedshiftParams, RedshiftSpec};
pub use zenergy::{z_coefficient, z_energy, z_energy_decomposed, zcoef_sign_scan, ZBracket};

use crate::error::{LabError, Result};
use crate::evolution::{FlatWave, RadialTable, SlicePoint, Source};
use crate::geometry::{FoliationSpec, RadialPoint, Schwarzschild};
use crate::harmonics::ModeIndex;
use num_complex::Complex64;
use serde::Serialize;

type C = Complex64;

/// A mode together with the field it belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeParams {
    pub mode: ModeIndex,
    pub source: Source,
}

impl ModeParams {
    pub fn new(mode: ModeIndex, source: Source) -> Result<Self> {
        if mode.s != source.spin() {
            return Err(LabError::Mode { s: mode.s, l: mode.l, reason: "spin does not match the source field" });
        }
        Ok(Self { mode, source })
    }

    /// `Λ = ℓ(ℓ+1) − s²`.
    pub fn angular(&self) -> f64 {
        self.mode.lambda()
    }

    /// `Λ/r² + P`.
    pub fn q(&self, bg: &Schwarzschild, p: &RadialPoint) -> f64 {
        self.angular() / (p.r * p.r) + self.source.potential(bg, p)
    }
}

/// Covariant `(t, r*)` components of the sphere-integrated stress tensor.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Stress {
    pub tt: f64,
    pub ts: f64,
    pub ss: f64,
}

pub fn stress(params: &ModeParams, bg: &Schwarzschild, p: &RadialPoint, f: C, f_t: C, f_s: C) -> Stress {
    let kin = 0.5 * (f_t.norm_sqr() + f_s.norm_sqr());
    let pot = 0.5 * p.a * params.q(bg, p) * f.norm_sqr();
    Stress { tt: kin + pot, ts: (f_t * f_s.conj()).re, ss: kin - pot }
}

/// Stress samples on a flat slice.
#[derive(Debug, Clone)]
pub struct ModeStress {
    pub t_tt: Vec<f64>,
    pub t_ts: Vec<f64>,
    pub t_ss: Vec<f64>,
}

impl ModeStress {
    pub fn new(table: &RadialTable, params: &ModeParams, wave: &FlatWave) -> Self {
        let mut out = ModeStress { t_tt: vec![], t_ts: vec![], t_ss: vec![] };
        for (j, p) in table.points.iter().enumerate() {
            let s = stress(params, &table.bg, p, wave.f[j], wave.f_t[j], wave.f_s[j]);
            out.t_tt.push(s.tt);
            out.t_ts.push(s.ts);
            out.t_ss.push(s.ss);
        }
        out
    }
}

/// Trapezoid rule on equally spaced samples.
pub fn trapezoid(h: f64, values: &[f64]) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => h * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[n - 1])),
    }
}

/// `E^T = ∫ [½|f_t|² + ½|f_{r*}|² + ½A(Λ/r² + P)|f|²] r² dr*` on `{t = const}`.
pub fn t_energy(table: &RadialTable, params: &ModeParams, wave: &FlatWave) -> f64 {
    let dens: Vec<f64> = table
        .points
        .iter()
        .enumerate()
        .map(|(j, p)| p.r * p.r * stress(params, &table.bg, p, wave.f[j], wave.f_t[j], wave.f_s[j]).tt)
        .collect();
    trapezoid(table.grid.h, &dens)
}

/// Multiplier vector fields whose currents `J_a = T_ab C^b` we integrate.
#[derive(Debug, Clone, Copy)]
pub enum Multiplier<'a> {
    T,
    N(&'a RedshiftSpec),
    /// `Z = ½(t² + r*²)∂_t + t r* ∂_{r*}`.
    Z,
}

impl Multiplier<'_> {
    /// `(C^t, C^{r*})` at an event.
    pub fn components(&self, p: &RadialPoint, t: f64, r_star: f64) -> (f64, f64) {
        match self {
            Multiplier::T => (1.0, 0.0),
            Multiplier::N(spec) => {
                let (c0, c1) = spec.components(p.r);
                (c0 - c1 * p.mu / p.a, c1 / p.a)
            }
            Multiplier::Z => (0.5 * (t * t + r_star * r_star), t * r_star),
        }
    }
}

/// Flux density of `J^C` through `t = τ + h(r*)` per unit `r*`:
/// `r²[(T_tt C^t + T_{tr*} C^{r*}) + h'(T_{r*t} C^t + T_{r*r*} C^{r*})]`.
pub fn flux_density(s: &Stress, r: f64, ct: f64, cs: f64, h_prime: f64) -> f64 {
    let e = s.tt * ct + s.ts * cs;
    let p = -(s.ts * ct + s.ss * cs);
    r * r * (e - h_prime * p)
}

/// A graph slice `t = τ + h(r*)` restricted to a contiguous run of nodes.
#[derive(Debug, Clone)]
pub struct GraphSlice {
    pub tau: f64,
    pub nodes: Vec<usize>,
    pub times: Vec<f64>,
    pub slopes: Vec<f64>,
}

impl GraphSlice {
    pub fn targets(&self) -> Vec<(usize, f64)> {
        self.nodes.iter().cloned().zip(self.times.iter().cloned()).collect()
    }

    /// `r*` range covered.
    pub fn extent(&self, table: &RadialTable) -> (f64, f64) {
        match (self.nodes.first(), self.nodes.last()) {
            (Some(&a), Some(&b)) => (table.grid.x(a), table.grid.x(b)),
            _ => (f64::NAN, f64::NAN),
        }
    }
}

/// Heights `(h, h')` of `Σ_τ = {t* = τ}` at every node.
pub fn sigma_heights(table: &RadialTable) -> Vec<(f64, f64)> {
    table.points.iter().map(|p| table.bg.sigma_height(p)).collect()
}

/// Heights `(h, h')` of `Σ̃_τ` at every node.
pub fn tilde_heights(table: &RadialTable, fol: &FoliationSpec) -> Vec<(f64, f64)> {
    table.points.iter().map(|p| fol.height(p)).collect()
}

/// The part of `t = τ + h(r*)` that a run over `[t_lo, t_hi]` can sample:
/// nodes at least `guard` away from the grid ends, with `A ≥ a_min` (closer
/// to the horizon the `(t, r*)` form of the flux loses all precision) and
/// with `t_lo ≤ t ≤ t_hi`. The longest contiguous run is kept.
pub fn graph_slice(
    table: &RadialTable,
    tau: f64,
    heights: &[(f64, f64)],
    t_range: (f64, f64),
    a_min: f64,
    guard: usize,
) -> Option<GraphSlice> {
    let n = table.grid.n;
    let ok = |j: usize| {
        let t = tau + heights[j].0;
        j >= guard && j + guard < n && table.points[j].a >= a_min && t >= t_range.0 && t <= t_range.1
    };
    let (mut best, mut cur) = ((0, 0), None::<usize>);
    for j in 0..=n {
        if j < n && ok(j) {
            cur.get_or_insert(j);
        } else if let Some(s) = cur.take() {
            if j - s > best.1 - best.0 {
                best = (s, j);
            }
        }
    }
    if best.1 - best.0 < 2 {
        return None;
    }
    let nodes: Vec<usize> = (best.0..best.1).collect();
    Some(GraphSlice {
        tau,
        times: nodes.iter().map(|&j| tau + heights[j].0).collect(),
        slopes: nodes.iter().map(|&j| heights[j].1).collect(),
        nodes,
    })
}

/// `∫ (J^t − h' J^{r*})`-type flux of the current of `mult` through a
/// captured graph slice, by the trapezoid rule on its nodes.
pub fn flux_through_graph(
    table: &RadialTable,
    params: &ModeParams,
    points: &[SlicePoint],
    slopes: &[f64],
    mult: Multiplier<'_>,
) -> Result<f64> {
    let mut dens = Vec::with_capacity(points.len());
    for (k, (sp, &hp)) in points.iter().zip(slopes).enumerate() {
        if k > 0 && sp.node != points[k - 1].node + 1 {
            return Err(LabError::Construction("slice nodes are not contiguous".into()));
        }
        let x = table.grid.x(sp.node);
        if !(hp.abs() < 1.0) {
            return Err(LabError::NotSpacelike { r_star: x, slope: hp.abs() });
        }
        let p = table.points[sp.node];
        let s = stress(params, &table.bg, &p, sp.f, sp.f_t, sp.f_s);
        let (ct, cs) = mult.components(&p, sp.t, x);
        dens.push(flux_density(&s, p.r, ct, cs, hp));
    }
    Ok(trapezoid(table.grid.h, &dens))
}

/// Unwraps a captured slice, failing when some node was never reached.
pub fn complete(points: &[Option<SlicePoint>]) -> Result<Vec<SlicePoint>> {
    points
        .iter()
        .map(|p| p.ok_or_else(|| LabError::Construction("slice not fully covered by the run".into())))
        .collect()
}

/// `sup |f|` over a captured slice.
pub fn sup_abs(points: &[SlicePoint]) -> f64 {
    points.iter().map(|p| p.f.norm()).fold(0.0, f64::max)
}

/// The initial energies with the angular commutators replaced by powers of
/// `Λ` on the mode:
/// `E_k = Σ_{m ≤ m_k} Λ^m ∫ w_k J^N·η` on `{t = 0}`,
/// `(m_k, w_k) = (2, 1), (3, 1 + r*²), (6, 1 + r*²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InitialEnergies {
    pub e0: f64,
    pub e1: f64,
    pub e2: f64,
}

/// Relative share of the weighted energy in the outermost 5% of the window
/// above which the weighted integrals are declared divergent.
pub const TAIL_TOLERANCE: f64 = 1e-8;

pub fn initial_energies(table: &RadialTable, params: &ModeParams, wave: &FlatWave, n: &RedshiftSpec) -> Result<InitialEnergies> {
    let h = table.grid.h;
    let mult = Multiplier::N(n);
    let mut plain = Vec::with_capacity(table.grid.n);
    let mut weighted = Vec::with_capacity(table.grid.n);
    for (j, p) in table.points.iter().enumerate() {
        let x = table.grid.x(j);
        let d = if wave.f[j].norm() == 0.0 && wave.f_t[j].norm() == 0.0 && wave.f_s[j].norm() == 0.0 {
            0.0
        } else {
            let s = stress(params, &table.bg, p, wave.f[j], wave.f_t[j], wave.f_s[j]);
            let (ct, cs) = mult.components(p, 0.0, x);
            flux_density(&s, p.r, ct, cs, 0.0)
        };
        plain.push(d);
        weighted.push((1.0 + x * x) * d);
    }
    let total = trapezoid(h, &weighted);
    let cut = table.grid.n - (table.grid.n / 20).max(2);
    let tail = trapezoid(h, &weighted[cut..]);
    if total > 0.0 && tail / total > TAIL_TOLERANCE {
        return Err(LabError::Divergent { what: "weighted initial energy", tail: tail / total });
    }
    let lam = params.angular();
    let sum = |m: i32| (0..=m).map(|k| lam.powi(k)).sum::<f64>();
    let e_plain = trapezoid(h, &plain);
    Ok(InitialEnergies { e0: sum(2) * e_plain, e1: sum(3) * total, e2: sum(6) * total })
}
