//! The coupled axial system `(α, β, γ)`: definitions from the connection
//! components, consistent initial data, residuals of the four first-order
//! equations, and the `ℓ = 1` normalization by linearized Kerr.
//!
//! Per mode write `α = a Y_{2ℓ}`, `β = b Y_{1ℓ}`, `γ = g Y_{2ℓ}` and
//! `λ = √((ℓ − 1)(ℓ + 2))`. On the unit sphere `ð̄ Y_{2ℓ} = −λ Y_{1ℓ}` and
//! `ð Y_{1ℓ} = λ Y_{2ℓ}`, so the four equations become
//!
//! ```text
//! (r² b)_r = λ (r⁴/Δ) g          b_t = λ a
//! (r² a)_r = (r⁴/Δ) g_t          (λ/r²) b − g_r + (r²/Δ) a_t = 0
//! ```

use crate::error::{LabError, Result};
use crate::evolution::{
    d1, reduced_potential_at, Evolver, FlatSnapshot, GammaLink, Observer, Profile, RadialTable, Scheme, Wave,
};
use crate::geometry::{RadialPoint, Schwarzschild};
use crate::harmonics::{raise_constant, SphereGrid};
use crate::jet::Jet;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

type C = Complex64;

/// `λ = √((ℓ − 1)(ℓ + 2))`, the spin 1 → 2 raise constant.
pub fn coupling(l: u32) -> f64 {
    raise_constant(1, l)
}

/// Connection components on a `(r, cos θ)` product grid, indexed `[radius][node]`.
#[derive(Debug, Clone)]
pub struct ConnectionComponents {
    pub radii: Vec<f64>,
    pub q02: Vec<Vec<f64>>,
    pub q03: Vec<Vec<f64>>,
    pub q23: Vec<Vec<f64>>,
}

/// Coefficients of `α`, `β`, `γ` relative to powers of `Ψ₋₁`.
#[derive(Debug, Clone)]
pub struct AxialFields {
    pub radii: Vec<f64>,
    pub alpha: Vec<Vec<f64>>,
    pub beta: Vec<Vec<f64>>,
    pub gamma: Vec<Vec<f64>>,
}

/// `α = (Δ/r²) sin³θ Q₂₃`, `β = r² sin²θ Q₀₂`, `γ = sin³θ Q₀₃`.
pub fn fields_from_q(bg: &Schwarzschild, sphere: &SphereGrid, q: &ConnectionComponents) -> Result<AxialFields> {
    let sin: Vec<f64> = sphere.cos_theta().iter().map(|x| (1.0 - x * x).sqrt()).collect();
    let mut out = AxialFields { radii: q.radii.clone(), alpha: vec![], beta: vec![], gamma: vec![] };
    for (i, &r) in q.radii.iter().enumerate() {
        bg.point(r)?;
        let a: Vec<f64> = q.q23[i].iter().zip(&sin).map(|(v, s)| bg.delta(r) / (r * r) * s.powi(3) * v).collect();
        let b: Vec<f64> = q.q02[i].iter().zip(&sin).map(|(v, s)| r * r * s * s * v).collect();
        let g: Vec<f64> = q.q03[i].iter().zip(&sin).map(|(v, s)| s.powi(3) * v).collect();
        sphere.check_regular(&a, 2)?;
        sphere.check_regular(&b, 1)?;
        sphere.check_regular(&g, 2)?;
        out.alpha.push(a);
        out.beta.push(b);
        out.gamma.push(g);
    }
    Ok(out)
}

/// Inverse of [`fields_from_q`].
pub fn q_from_fields(bg: &Schwarzschild, sphere: &SphereGrid, f: &AxialFields) -> Result<ConnectionComponents> {
    let sin: Vec<f64> = sphere.cos_theta().iter().map(|x| (1.0 - x * x).sqrt()).collect();
    let mut q = ConnectionComponents { radii: f.radii.clone(), q02: vec![], q03: vec![], q23: vec![] };
    for (i, &r) in f.radii.iter().enumerate() {
        bg.point(r)?;
        q.q23.push(f.alpha[i].iter().zip(&sin).map(|(v, s)| v * r * r / (bg.delta(r) * s.powi(3))).collect());
        q.q02.push(f.beta[i].iter().zip(&sin).map(|(v, s)| v / (r * r * s * s)).collect());
        q.q03.push(f.gamma[i].iter().zip(&sin).map(|(v, s)| v / s.powi(3)).collect());
    }
    Ok(q)
}

/// `Q₀₂` of the linearized Kerr solution: `−6 M a⁽¹⁾ / r⁴`.
pub fn kerr_q02(bg: &Schwarzschild, a1: f64, r: f64) -> f64 {
    -6.0 * bg.mass() * a1 / r.powi(4)
}

/// The per-mode state of the coupled system on the `r*` grid.
#[derive(Debug, Clone)]
pub struct CoupledSlice {
    pub l: u32,
    pub t: f64,
    pub a: Vec<C>,
    pub a_t: Vec<C>,
    pub b: Vec<C>,
    pub b_t: Vec<C>,
    pub g: Vec<C>,
}

fn jets(profile: &Profile, table: &RadialTable) -> Vec<Jet> {
    let h = table.grid.h;
    let mut js: Vec<Jet> = (0..table.grid.n).map(|j| profile.jet(&table.bg, table.grid.x(j))).collect();
    if js.iter().any(|j| j.d.is_nan()) {
        let v: Vec<f64> = js.iter().map(|j| j.v).collect();
        let dv: Vec<f64> = (0..v.len()).map(|j| d1(&v, j, h, 8)).collect();
        let ddv: Vec<f64> = (0..v.len()).map(|j| d1(&dv, j, h, 8)).collect();
        for (j, jet) in js.iter_mut().enumerate() {
            jet.d = dv[j];
            jet.dd = ddv[j];
        }
    }
    js
}

/// Builds `(a, a_t, b, b_t, g)` at `t = 0` from free `a(0)` and `b(0)`:
/// `b_t = λ a`, `g = (b_{r*} + 2A b/r)/λ`, `a_t = g_{r*} − A λ b / r²`.
pub fn consistent_initial_data(table: &RadialTable, l: u32, alpha: &Profile, beta: &Profile) -> Result<CoupledSlice> {
    if l == 0 {
        return Err(LabError::Mode { s: 1, l, reason: "beta has no l = 0 mode" });
    }
    if l == 1 && !alpha.is_zero() {
        return Err(LabError::Mode { s: 2, l, reason: "alpha and gamma have no l = 1 content" });
    }
    alpha.check_support(&table.grid)?;
    beta.check_support(&table.grid)?;
    let lam = coupling(l);
    let ja = jets(alpha, table);
    let jb = jets(beta, table);
    let n = table.grid.n;
    let z = C::new(0.0, 0.0);
    let mut s = CoupledSlice { l, t: 0.0, a: vec![z; n], a_t: vec![z; n], b: vec![z; n], b_t: vec![z; n], g: vec![z; n] };
    for (j, p) in table.points.iter().enumerate() {
        let (a, b) = (ja[j], jb[j]);
        s.a[j] = C::new(a.v, 0.0);
        s.b[j] = C::new(b.v, 0.0);
        s.b_t[j] = C::new(lam * a.v, 0.0);
        if l >= 2 {
            let aor = p.a / p.r;
            let aor_s = p.a * (-1.0 / (p.r * p.r) + 4.0 * table.bg.mass() / p.r.powi(3));
            let g = (b.d + 2.0 * aor * b.v) / lam;
            let g_s = (b.dd + 2.0 * aor * b.d + 2.0 * aor_s * b.v) / lam;
            s.g[j] = C::new(g, 0.0);
            s.a_t[j] = C::new(g_s - p.a * lam * b.v / (p.r * p.r), 0.0);
        }
    }
    Ok(s)
}

/// Evolver for one `ℓ` of the coupled system: wave 0 is `α`, wave 1 is `β`,
/// and `γ` is integrated along `α`.
pub fn coupled_evolver<'a>(table: &'a RadialTable, scheme: Scheme, slice: &CoupledSlice) -> Result<Evolver<'a>> {
    let veff: Vec<f64> = table.points.iter().map(|p| reduced_potential_at(&table.bg, slice.l, p)).collect();
    let lift = |f: &[C]| -> Vec<C> { f.iter().zip(&table.points).map(|(v, p)| v * p.r).collect() };
    let waves = vec![
        Wave::new(lift(&slice.a), lift(&slice.a_t), veff.clone()),
        Wave::new(lift(&slice.b), lift(&slice.b_t), veff),
    ];
    let gamma = if slice.l >= 2 { Some(GammaLink::new(0, slice.g.clone())) } else { None };
    Evolver::new(table, scheme, waves, gamma, slice.t)
}

/// L² norms over the `r*` grid of the four equations, each multiplied by a
/// smooth factor that removes the `1/A` singularity:
/// `res_Rtphi = b_{r*} + 2Ab/r − λg`, `res_Rrphi = b_t − λa`,
/// `res_Rthetaphi = a_{r*} + 2Aa/r − g_t`, `res_closed = Aλb/r² − g_{r*} + a_t`.
/// The `γ_{r*}` relation `g_{r*} = a_t + Aλb/r²` is `−res_closed`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals {
    pub t: f64,
    pub ell: u32,
    pub res_rtphi: f64,
    pub res_rrphi: f64,
    pub res_rthetaphi: f64,
    pub res_closed: f64,
    pub res_gamma_rstar: f64,
}

/// Nodes kept away from the ends where the stencils lose order.
const EDGE: usize = 8;

pub fn constraint_residuals(table: &RadialTable, snap: &FlatSnapshot, l: u32, g_t: &[C], deriv_order: u32) -> Residuals {
    let lam = coupling(l);
    let h = table.grid.h;
    let (wa, wb) = (&snap.waves[0], &snap.waves[1]);
    let zero = vec![C::new(0.0, 0.0); table.grid.n];
    let g = snap.gamma.as_ref().unwrap_or(&zero);
    let mut acc = [0.0; 5];
    for j in EDGE..table.grid.n - EDGE {
        let p = table.points[j];
        let g_s = d1(g, j, h, deriv_order);
        let r = [
            wb.f_s[j] + wb.f[j] * (2.0 * p.a / p.r) - g[j] * lam,
            wb.f_t[j] - wa.f[j] * lam,
            wa.f_s[j] + wa.f[j] * (2.0 * p.a / p.r) - g_t[j],
            wb.f[j] * (p.a * lam / (p.r * p.r)) - g_s + wa.f_t[j],
            g_s - wa.f_t[j] - wb.f[j] * (p.a * lam / (p.r * p.r)),
        ];
        for (a, v) in acc.iter_mut().zip(r) {
            *a += v.norm_sqr();
        }
    }
    let nrm = |v: f64| (v * h).sqrt();
    Residuals {
        t: snap.t,
        ell: l,
        res_rtphi: nrm(acc[0]),
        res_rrphi: nrm(acc[1]),
        res_rthetaphi: nrm(acc[2]),
        res_closed: nrm(acc[3]),
        res_gamma_rstar: nrm(acc[4]),
    }
}

/// Records residuals at requested times. `γ_t` comes from a centred time
/// difference of the integrated `γ` whose order matches the scheme, so the
/// `(r²α)_r` equation is tested independently of the update rule.
pub struct ResidualRecorder {
    l: u32,
    times: Vec<f64>,
    taken: Vec<bool>,
    deriv_order: u32,
    history: Vec<(f64, Vec<C>)>,
    pending: Vec<FlatSnapshot>,
    pub residuals: Vec<Residuals>,
}

impl ResidualRecorder {
    pub fn new(l: u32, times: Vec<f64>, deriv_order: u32) -> Self {
        let taken = vec![false; times.len()];
        Self { l, times, taken, deriv_order, history: Vec::new(), pending: Vec::new(), residuals: Vec::new() }
    }

    fn depth(&self) -> usize {
        if self.deriv_order >= 4 {
            2
        } else {
            1
        }
    }

    fn push(&mut self, ev: &Evolver<'_>) {
        let g = ev.gamma.as_ref().map(|g| g.g.clone()).unwrap_or_else(|| vec![C::new(0.0, 0.0); ev.table.grid.n]);
        self.history.push((ev.t, g));
        let keep = 2 * self.depth() + 1;
        if self.history.len() > keep {
            self.history.remove(0);
        }
        let tol = 0.5 * (ev.t - ev.prev_t).abs() * (1.0 + 1e-9);
        for i in 0..self.times.len() {
            if !self.taken[i] && (self.times[i] - ev.t).abs() <= tol.max(1e-12) {
                self.taken[i] = true;
                self.pending.push(FlatSnapshot::take(ev, self.deriv_order));
            }
        }
        let d = self.depth();
        if self.history.len() == 2 * d + 1 {
            let centre = self.history[d].0;
            if let Some(pos) = self.pending.iter().position(|s| s.t == centre) {
                let snap = self.pending.remove(pos);
                let dt = (self.history[d + 1].0 - self.history[d - 1].0) / 2.0;
                let n = ev.table.grid.n;
                let hs = &self.history;
                let g_t: Vec<C> = (0..n)
                    .map(|j| {
                        if d == 1 {
                            (hs[2].1[j] - hs[0].1[j]) / (2.0 * dt)
                        } else {
                            (hs[1].1[j] * 8.0 - hs[3].1[j] * 8.0 - hs[0].1[j] + hs[4].1[j]) * (-1.0 / (12.0 * dt))
                        }
                    })
                    .collect();
                let res = constraint_residuals(ev.table, &snap, self.l, &g_t, self.deriv_order);
                self.residuals.push(res);
            }
        }
    }
}

impl Observer for ResidualRecorder {
    fn start(&mut self, ev: &Evolver<'_>) -> Result<()> {
        self.push(ev);
        Ok(())
    }
    fn observe(&mut self, ev: &Evolver<'_>) -> Result<()> {
        self.push(ev);
        Ok(())
    }
}

/// Integrates `γ_t = α_{r*} + (2Δ/r³) α` with the trapezoid rule along a
/// sequence of flat `α` snapshots (wave index `alpha`).
pub fn reconstruct_gamma(table: &RadialTable, snaps: &[FlatSnapshot], alpha: usize, gamma0: &[C]) -> Result<Vec<Vec<C>>> {
    let mut out = vec![gamma0.to_vec()];
    if snaps.is_empty() {
        return Ok(out);
    }
    let rate = |s: &FlatSnapshot| -> Vec<C> {
        let w = &s.waves[alpha];
        table.points.iter().enumerate().map(|(j, p)| w.f_s[j] + w.f[j] * (2.0 * p.a / p.r)).collect()
    };
    let mut prev = rate(&snaps[0]);
    for k in 1..snaps.len() {
        let dt = snaps[k].t - snaps[k - 1].t;
        if dt.abs() > table.grid.h {
            return Err(LabError::Sparse(format!(
                "snapshot spacing {dt} exceeds the grid spacing {}; the trapezoid rule would lose its order",
                table.grid.h
            )));
        }
        let next = rate(&snaps[k]);
        let last = out.last().expect("seeded with gamma0");
        let g: Vec<C> = last.iter().zip(prev.iter().zip(&next)).map(|(g, (a, b))| g + (a + b) * (0.5 * dt)).collect();
        out.push(g);
        prev = next;
    }
    Ok(out)
}

/// Result of fitting `β₁` against the static basis.
#[derive(Debug, Clone, Serialize)]
pub struct KerrFit {
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    pub a1: f64,
    pub tolerance: f64,
    pub residual_max: f64,
    pub normalized_max: f64,
    pub verdict: String,
}

/// The non-flat static solution `(12M²r + 3Mr² + r³ + 24M³ log(r − 2M))/(3r²)`.
pub fn beta1_second_branch(bg: &Schwarzschild, p: &RadialPoint) -> f64 {
    let (m, r) = (bg.mass(), p.r);
    (12.0 * m * m * r + 3.0 * m * r * r + r.powi(3) + 24.0 * m.powi(3) * p.x.ln()) / (3.0 * r * r)
}

/// Least-squares fit of a `β₁` coefficient sampled at `points` against
/// `{1/r², second branch}`. Rejects data whose second-branch amplitude,
/// times the branch's largest value on the window, exceeds `1e−6 ‖β₁‖∞`
/// and the largest fit residual. Below the residual the branch cannot be
/// told apart from noise in the samples.
/// On success `a⁽¹⁾ = C₁/(6M)` and the returned samples are `β₁ − 6Ma⁽¹⁾/r²`,
/// which is `β₁` plus the linearized Kerr coefficient with that `a⁽¹⁾`.
pub fn normalize_kerr(bg: &Schwarzschild, points: &[RadialPoint], beta1: &[f64]) -> Result<(KerrFit, Vec<f64>)> {
    let n = points.len();
    let radii: Vec<f64> = points.iter().map(|p| p.r).collect();
    let scale = beta1.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if n == 0 || scale == 0.0 {
        let fit = KerrFit {
            c1: 0.0,
            c2: 0.0,
            a1: 0.0,
            tolerance: 0.0,
            residual_max: 0.0,
            normalized_max: 0.0,
            verdict: "pass".into(),
        };
        return Ok((fit, beta1.to_vec()));
    }
    let phi2: Vec<f64> = points.iter().map(|p| beta1_second_branch(bg, p)).collect();
    let c1n = radii.iter().map(|r| r.powi(-2)).fold(0.0_f64, |m, v| m.max(v.abs()));
    let c2n = phi2.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let design = DMatrix::from_fn(n, 2, |i, k| if k == 0 { radii[i].powi(-2) / c1n } else { phi2[i] / c2n });
    if beta1.len() != n {
        return Err(LabError::Construction(format!("{} samples for {n} radii", beta1.len())));
    }
    let rhs = DVector::from_column_slice(beta1);
    let sol = design
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| LabError::Construction(format!("kerr fit failed: {e}")))?;
    let c1 = sol[0] / c1n;
    let c2 = sol[1] / c2n;
    let residual_max = radii
        .iter()
        .zip(beta1)
        .zip(&phi2)
        .map(|((r, b), p)| (b - c1 / (r * r) - c2 * p).abs())
        .fold(0.0, f64::max);
    let tolerance = (1e-6 * scale).max(residual_max);
    if (c2 * c2n).abs() > tolerance {
        return Err(LabError::NotAsymptoticallyFlat { c2: c2.abs(), tol: tolerance / c2n });
    }
    let a1 = c1 / (6.0 * bg.mass());
    let normalized: Vec<f64> = radii.iter().zip(beta1).map(|(r, b)| b - 6.0 * bg.mass() * a1 / (r * r)).collect();
    let normalized_max = normalized.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    Ok((
        KerrFit { c1, c2, a1, tolerance, residual_max, normalized_max, verdict: "pass".into() },
        normalized,
    ))
}

/// `max_t max_{r*} |∂_t β₁|` over flat snapshots of wave `beta`.
pub fn verify_beta1_static(snaps: &[FlatSnapshot], beta: usize) -> f64 {
    snaps.iter().flat_map(|s| s.waves[beta].f_t.iter().map(|v| v.norm())).fold(0.0, f64::max)
}

/// Replaces `b` by the solution of the discrete static problem
/// `D² u − V_eff u = 0` (the scheme's own Laplacian) that agrees with `r b`
/// on the frozen end nodes. Sampling `C₁/r²` directly leaves a truncation
/// error of the Laplacian that the evolution turns into a slow drift.
pub fn make_discretely_static(table: &RadialTable, scheme: Scheme, slice: &mut CoupledSlice) -> Result<()> {
    let n = table.grid.n;
    let k = scheme.half_width();
    let h = table.grid.h;
    let ih2 = 1.0 / (h * h);
    let stencil: Vec<f64> = match scheme {
        Scheme::Second => vec![ih2, -2.0 * ih2, ih2],
        Scheme::Fourth => vec![-ih2 / 12.0, 16.0 * ih2 / 12.0, -30.0 * ih2 / 12.0, 16.0 * ih2 / 12.0, -ih2 / 12.0],
    };
    let u: Vec<f64> = slice.b.iter().zip(&table.points).map(|(b, p)| b.re * p.r).collect();
    let mut band = Band::new(n, k);
    let mut rhs = vec![0.0; n];
    for j in 0..n {
        if j < k || j >= n - k {
            band.set(j, j, 1.0);
            rhs[j] = u[j];
            continue;
        }
        let v = reduced_potential_at(&table.bg, slice.l, &table.points[j]);
        for (o, c) in stencil.iter().enumerate() {
            band.set(j, j + o - k, *c);
        }
        band.add(j, j, -v);
    }
    let sol = band.solve(rhs)?;
    for (j, p) in table.points.iter().enumerate() {
        slice.b[j] = C::new(sol[j] / p.r, 0.0);
        slice.b_t[j] = C::new(0.0, 0.0);
    }
    Ok(())
}

/// Square banded matrix with half-bandwidth `k`, solved by elimination
/// without pivoting.
struct Band {
    n: usize,
    k: usize,
    data: Vec<f64>,
}

impl Band {
    fn new(n: usize, k: usize) -> Self {
        Self { n, k, data: vec![0.0; n * (2 * k + 1)] }
    }
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (2 * self.k + 1) + (j + self.k - i)
    }
    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }
    fn set(&mut self, i: usize, j: usize, v: f64) {
        let ix = self.idx(i, j);
        self.data[ix] = v;
    }
    fn add(&mut self, i: usize, j: usize, v: f64) {
        let ix = self.idx(i, j);
        self.data[ix] += v;
    }
    fn solve(mut self, mut rhs: Vec<f64>) -> Result<Vec<f64>> {
        let (n, k) = (self.n, self.k);
        for p in 0..n {
            let piv = self.get(p, p);
            if piv.abs() < 1e-300 {
                return Err(LabError::Construction("singular static problem".into()));
            }
            for i in p + 1..(p + k + 1).min(n) {
                let f = self.get(i, p) / piv;
                if f == 0.0 {
                    continue;
                }
                for j in p..(p + k + 1).min(n) {
                    let v = self.get(p, j);
                    self.add(i, j, -f * v);
                }
                rhs[i] -= f * rhs[p];
            }
        }
        for p in (0..n).rev() {
            let mut acc = rhs[p];
            for j in p + 1..(p + k + 1).min(n) {
                acc -= self.get(p, j) * rhs[j];
            }
            rhs[p] = acc / self.get(p, p);
        }
        Ok(rhs)
    }
}

/// Residuals of both static basis solutions in
/// `(Δ/r²)β'' + ((2r − 2M)/r²)β' − (2/r²)(1 − 4M/r)β = 0`, relative to the
/// size of the individual terms, maximized over `r ∈ [2.05M, 200M]`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Beta1OdeCheck {
    pub first_branch: f64,
    pub second_branch: f64,
    pub sum: f64,
}

pub fn beta1_ode_check(bg: &Schwarzschild) -> Beta1OdeCheck {
    let m = bg.mass();
    let second = |r: f64| beta1_second_branch(bg, &RadialPoint { r, x: r - 2.0 * m, a: 1.0 - 2.0 * m / r, mu: 2.0 * m / r });
    let residual = |f: &dyn Fn(f64) -> f64| -> f64 {
        let mut worst = 0.0_f64;
        let samples = 400;
        for i in 0..=samples {
            let r = 2.05 * m * (200.0 / 2.05_f64).powf(i as f64 / samples as f64);
            let d = 0.02 * (r - 2.0 * m).min(r);
            let c1 = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
            let c2 = [8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];
            let f0 = f(r);
            let mut fp = 0.0;
            let mut fpp = -205.0 / 72.0 * f0;
            for k in 0..4 {
                let (a, b) = (f(r + (k + 1) as f64 * d), f(r - (k + 1) as f64 * d));
                fp += c1[k] * (a - b);
                fpp += c2[k] * (a + b);
            }
            fp /= d;
            fpp /= d * d;
            let t1 = bg.delta(r) / (r * r) * fpp;
            let t2 = (2.0 * r - 2.0 * m) / (r * r) * fp;
            let t3 = 2.0 / (r * r) * (1.0 - 4.0 * m / r) * f0;
            let size = t1.abs() + t2.abs() + t3.abs();
            worst = worst.max((t1 + t2 - t3).abs() / size);
        }
        worst
    };
    Beta1OdeCheck {
        first_branch: residual(&|r| 1.0 / (r * r)),
        second_branch: residual(&|r| second(r)),
        sum: residual(&|r| 1.0 / (r * r) + second(r)),
    }
}
