//! The red-shift multiplier `N` and its numerical certification.
//!
//! Work in ingoing coordinates `(t*, r)` where
//! `g = −A dt*² + 2μ dt* dr + (1 + μ) dr² + r² dΩ²` is regular at `r = 2M`.
//! For a mode with state `s = (∂_{t*} f, ∂_r f, f)` the bulk density
//! `K^N = ½ T^{ab}(L_N g)_{ab} + (N^r/r) tr_S T − ½ N^r P' |f|²` and the
//! energy density `J^N·N = T(N, N)` are quadratic forms in `s`, so
//! `K^N ≥ c J^N·N` at a radius holds for every state iff the smallest
//! generalized eigenvalue of the pair is at least `c`.

use super::ModeParams;
use crate::error::{LabError, Result};
use crate::evolution::Source;
use crate::geometry::Schwarzschild;
use crate::harmonics::ModeIndex;
use crate::jet::{smooth_step, Jet};
use nalgebra::{Matrix2, Matrix3, SymmetricEigen, Vector2, Vector3};
use serde::{Deserialize, Serialize};

/// `N = C⁰ ∂_{t*} + C¹ ∂_r` with `x = (r − 2M)/M`,
/// `C⁰ = 1 + χ(δ₂ + δ₁ x)`, `C¹ = −δ₂ χ (1 − η x)`,
/// and `χ` a C^∞ cutoff equal to 1 on `r ≤ r₀` and 0 on `r ≥ R₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RedshiftSpec {
    pub mass: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub eta: f64,
    pub r0: f64,
    pub big_r0: f64,
}

impl RedshiftSpec {
    fn jets(&self, r: f64) -> (Jet, Jet) {
        let m = self.mass;
        let rr = Jet::variable(r);
        let chi = smooth_step((-rr + self.big_r0) * (1.0 / (self.big_r0 - self.r0)));
        let x = (rr + (-2.0 * m)) * (1.0 / m);
        let c0 = chi * (x * self.delta1 + self.delta2) + 1.0;
        let c1 = chi * (x * (-self.eta) + 1.0) * (-self.delta2);
        (c0, c1)
    }

    /// `(N^{t*}, N^r)`.
    pub fn components(&self, r: f64) -> (f64, f64) {
        let (a, b) = self.jets(r);
        (a.v, b.v)
    }

    /// `(N^{t*}, N^r)` and their `r` derivatives.
    pub fn components_with_derivatives(&self, r: f64) -> ([f64; 2], [f64; 2]) {
        let (a, b) = self.jets(r);
        ([a.v, b.v], [a.d, b.d])
    }
}

/// Search and certification settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RedshiftParams {
    pub r0: f64,
    pub big_r0: f64,
    /// Modes `2 ≤ ℓ ≤ l_max` of both fields are certified.
    pub l_max: u32,
    pub eta: f64,
    /// Radial samples on each of `[2M + ε, r₀]` and `[r₀, R₀]`.
    pub samples: usize,
    pub delta2_grid: Vec<f64>,
    pub ratio_grid: Vec<f64>,
}

impl RedshiftParams {
    pub fn standard(bg: &Schwarzschild) -> Self {
        let m = bg.mass();
        Self {
            r0: 3.0 * m,
            big_r0: 10.0 * m,
            l_max: 8,
            eta: 0.006,
            samples: 2000,
            delta2_grid: vec![0.0625, 0.125, 0.25, 0.5, 1.0],
            ratio_grid: vec![0.0, 1.0, 2.0, 3.0],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchRow {
    pub delta1: f64,
    pub delta2: f64,
    pub c: f64,
}

/// Outcome of [`build_redshift`].
#[derive(Debug, Clone, Serialize)]
pub struct RedshiftCertificate {
    pub delta1: f64,
    pub delta2: f64,
    pub eta: f64,
    pub r0: f64,
    #[serde(rename = "R0")]
    pub big_r0: f64,
    pub kappa: f64,
    /// `min K^N / J^N·N` over `[2M + ε, r₀]`.
    pub c: f64,
    /// `max |K^N| / J^T·T` over `[r₀, R₀]`.
    #[serde(rename = "C")]
    pub big_c: f64,
    /// Range of `J^N·N / J^T·T` over `[r₀, R₀]`.
    pub equivalence: (f64, f64),
    pub sample_density: usize,
    pub c_doubled: f64,
    pub stable: bool,
    pub l_max: u32,
    /// `min −½ N(V)` over `[2M, r₀]`.
    pub potential_term_min: f64,
    pub search: Vec<SearchRow>,
    #[serde(skip)]
    pub spec: RedshiftSpec,
}

/// Distance from the horizon where the certified interval starts.
pub const HORIZON_OFFSET: f64 = 1e-6;

struct Forms {
    k: Matrix3<f64>,
    j: Matrix3<f64>,
    jt: Matrix3<f64>,
}

fn polarize(q: impl Fn(&Vector3<f64>) -> f64) -> Matrix3<f64> {
    let e = [Vector3::x(), Vector3::y(), Vector3::z()];
    let mut m = Matrix3::zeros();
    for i in 0..3 {
        m[(i, i)] = q(&e[i]);
    }
    for i in 0..3 {
        for k in i + 1..3 {
            let v = (q(&(e[i] + e[k])) - m[(i, i)] - m[(k, k)]) / 2.0;
            m[(i, k)] = v;
            m[(k, i)] = v;
        }
    }
    m
}

fn forms(bg: &Schwarzschild, spec: &RedshiftSpec, params: &ModeParams, r: f64) -> Forms {
    let m = bg.mass();
    let mu = 2.0 * m / r;
    let a = 1.0 - mu;
    let g = Matrix2::new(-a, mu, mu, 1.0 + mu);
    let ginv = Matrix2::new(-(1.0 + mu), mu, mu, a);
    let (c, dc) = spec.components_with_derivatives(r);
    let (c0, c1) = (c[0], c[1]);
    let off = -c1 * mu / r - a * dc[0] + mu * dc[1];
    let lg = Matrix2::new(-c1 * mu / r, off, off, -c1 * mu / r + 2.0 * (mu * dc[0] + (1.0 + mu) * dc[1]));
    let lam = params.angular();
    let pot = match params.source {
        Source::Alpha => 4.0 * a / (r * r),
        Source::Beta => (1.0 - 8.0 * m / r) / (r * r),
    };
    let dpot = params.source.potential_dr(bg, r);
    let q = lam / (r * r) + pot;
    let trace_lg = (ginv * lg).trace();
    let nvec = Vector2::new(c0, c1);
    let gnn = nvec.dot(&(g * nvec));

    let k = polarize(|s| {
        let df = Vector2::new(s[0], s[1]);
        let up = ginv * df;
        let grad2 = df.dot(&up);
        let tlg = up.dot(&(lg * up)) - 0.5 * trace_lg * (grad2 + q * s[2] * s[2]);
        0.5 * tlg - (c1 / r) * (grad2 + pot * s[2] * s[2]) - 0.5 * c1 * dpot * s[2] * s[2]
    });
    let energy = |w: Vector2<f64>, gww: f64| {
        move |s: &Vector3<f64>| {
            let df = Vector2::new(s[0], s[1]);
            let grad2 = df.dot(&(ginv * df));
            let wf = w.dot(&df);
            wf * wf - 0.5 * gww * (grad2 + q * s[2] * s[2])
        }
    };
    let j = polarize(energy(nvec, gnn));
    let jt = polarize(energy(Vector2::new(1.0, 0.0), -a));
    Forms { k, j, jt }
}

/// Extreme generalized eigenvalues of `(a, b)` with `b` positive definite.
fn generalized_range(a: &Matrix3<f64>, b: &Matrix3<f64>) -> Option<(f64, f64)> {
    let chol = b.cholesky()?;
    let l = chol.l();
    let linv = l.try_inverse()?;
    let m = linv * a * linv.transpose();
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let lo = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Some((lo, hi))
}

fn certified_modes(l_max: u32) -> Vec<ModeParams> {
    let mut out = Vec::new();
    for l in 2..=l_max.max(2) {
        out.push(ModeParams { mode: ModeIndex { s: 2, l }, source: Source::Alpha });
        out.push(ModeParams { mode: ModeIndex { s: 1, l }, source: Source::Beta });
    }
    out
}

struct Sweep {
    c: f64,
    big_c: f64,
    equivalence: (f64, f64),
}

fn sweep(bg: &Schwarzschild, spec: &RedshiftSpec, l_max: u32, samples: usize) -> Option<Sweep> {
    let m = bg.mass();
    let modes = certified_modes(l_max);
    let lo = 2.0 * m + HORIZON_OFFSET * m;
    let mut c = f64::INFINITY;
    for i in 0..=samples {
        let r = lo + (spec.r0 - lo) * i as f64 / samples as f64;
        for mp in &modes {
            let f = forms(bg, spec, mp, r);
            c = c.min(generalized_range(&f.k, &f.j)?.0);
        }
    }
    let mut big_c = 0.0_f64;
    let mut eq = (f64::INFINITY, 0.0_f64);
    for i in 0..=samples {
        let r = spec.r0 + (spec.big_r0 - spec.r0) * i as f64 / samples as f64;
        for mp in &modes {
            let f = forms(bg, spec, mp, r);
            let (klo, khi) = generalized_range(&f.k, &f.jt)?;
            big_c = big_c.max(klo.abs()).max(khi.abs());
            let (jlo, jhi) = generalized_range(&f.j, &f.jt)?;
            eq = (eq.0.min(jlo), eq.1.max(jhi));
        }
    }
    Some(Sweep { c, big_c, equivalence: eq })
}

/// Searches `(δ₁, δ₂)` over the parameter grid, keeps the pair with the
/// largest certified `c`, and repeats the sweep at twice the sample density.
pub fn build_redshift(bg: &Schwarzschild, params: &RedshiftParams) -> Result<RedshiftCertificate> {
    let m = bg.mass();
    if !(params.r0 > 2.0 * m && params.big_r0 > params.r0) {
        return Err(LabError::Construction(format!(
            "need 2M < r0 < R0, got r0 = {}, R0 = {}",
            params.r0, params.big_r0
        )));
    }
    let mut search = Vec::new();
    let mut best: Option<(RedshiftSpec, Sweep)> = None;
    for &d2 in &params.delta2_grid {
        for &ratio in &params.ratio_grid {
            let spec =
                RedshiftSpec { mass: m, delta1: ratio * d2, delta2: d2, eta: params.eta, r0: params.r0, big_r0: params.big_r0 };
            let Some(sw) = sweep(bg, &spec, params.l_max, params.samples) else {
                search.push(SearchRow { delta1: spec.delta1, delta2: d2, c: f64::NAN });
                continue;
            };
            search.push(SearchRow { delta1: spec.delta1, delta2: d2, c: sw.c });
            if best.as_ref().map_or(true, |(_, b)| sw.c > b.c) {
                best = Some((spec, sw));
            }
        }
    }
    let (spec, sw) = match best {
        Some(b) if b.1.c > 0.0 => b,
        other => {
            let c = other.map_or(f64::NAN, |b| b.1.c);
            return Err(LabError::Construction(format!(
                "no (delta1, delta2) on the search grid certifies K^N >= c J^N; best c = {c:.3e}"
            )));
        }
    };
    let doubled = sweep(bg, &spec, params.l_max, 2 * params.samples)
        .ok_or_else(|| LabError::Construction("energy form lost definiteness on the refined sweep".into()))?;
    let potential_term_min = (0..=params.samples)
        .map(|i| {
            let r = 2.0 * m + (params.r0 - 2.0 * m) * i as f64 / params.samples as f64;
            -0.5 * spec.components(r).1 * Source::Alpha.potential_dr(bg, r)
        })
        .fold(f64::INFINITY, f64::min);
    Ok(RedshiftCertificate {
        delta1: spec.delta1,
        delta2: spec.delta2,
        eta: spec.eta,
        r0: spec.r0,
        big_r0: spec.big_r0,
        kappa: bg.surface_gravity(),
        c: sw.c,
        big_c: sw.big_c,
        equivalence: sw.equivalence,
        sample_density: params.samples,
        c_doubled: doubled.c,
        stable: ((doubled.c - sw.c) / sw.c).abs() <= 0.1,
        l_max: params.l_max,
        potential_term_min,
        search,
        spec,
    })
}

impl RedshiftCertificate {
    pub fn spec(&self) -> RedshiftSpec {
        self.spec
    }
}
