//! The `X = f(r)∂_{r*}` multiplier and the degenerate integrated decay
//! (Morawetz) bulk.

use super::{trapezoid, ModeParams};
use crate::error::Result;
use crate::evolution::{d1, Evolver, Observer, RadialTable, Source};
use crate::geometry::{RadialPoint, Schwarzschild};
use num_complex::Complex64;
use serde::Serialize;

type C = Complex64;

/// `f = (1 + M/r)²(1 − 3M/r)`.
pub fn x_f(bg: &Schwarzschild, r: f64) -> f64 {
    let m = bg.mass();
    (1.0 + m / r).powi(2) * (1.0 - 3.0 * m / r)
}

/// `df/dr* = (M/r²)(1 − μ)(1 + M/r)(1 + 9M/r)`.
pub fn x_f_prime(bg: &Schwarzschild, r: f64) -> f64 {
    let m = bg.mass();
    m / (r * r) * bg.a(r) * (1.0 + m / r) * (1.0 + 9.0 * m / r)
}

/// Zeroth-order coefficient of the `K^{X,ω}` density. For `α` this is
/// `(−534M⁵ − 244M⁴r + 304M³r² + 118M²r³ − 105Mr⁴ + 16r⁵)/(4r⁸)`; for `β`
/// it is the analogous combination with `W`. In both cases adding
/// `(Λ_min/r²)(f/r)(1 − 3M/r)` gives the same positive quintic
/// `(−534M⁵ − 172M⁴r + 400M³r² + 102M²r³ − 137Mr⁴ + 24r⁵)/(4r⁸)`.
pub fn base_coefficient(bg: &Schwarzschild, r: f64, source: Source) -> f64 {
    let m = bg.mass();
    let post = [-534.0, -172.0, 400.0, 102.0, -137.0, 24.0];
    let num: f64 = post.iter().enumerate().map(|(k, c)| c * m.powi(5 - k as i32) * r.powi(k as i32)).sum();
    let lam_min = match source {
        Source::Alpha => 2.0,
        Source::Beta => 5.0,
    };
    num / (4.0 * r.powi(8)) - lam_min / (r * r) * x_f(bg, r) / r * (1.0 - 3.0 * m / r)
}

/// Per-`r*` densities (measure `A r² dr* dt`, the spacetime volume):
/// the three degenerate-LHS pieces and the `K^{X,ω}` density.
pub fn morawetz_density(bg: &Schwarzschild, params: &ModeParams, p: &RadialPoint, f: C, f_s: C) -> ([f64; 3], f64) {
    let m = bg.mass();
    let (r, a) = (p.r, p.a);
    let vol = a * r * r;
    let lam = params.angular() / (r * r);
    let f2 = f.norm_sqr();
    let fs2 = f_s.norm_sqr();
    let lhs = [
        vol * fs2 / (r * r),
        vol * f2 / r.powi(3),
        vol * (r - 3.0 * m).powi(2) / r.powi(3) * lam * f2,
    ];
    let xf = x_f(bg, r);
    let fp_over_a = m / (r * r) * (1.0 + m / r) * (1.0 + 9.0 * m / r);
    let kx = vol
        * (fp_over_a * fs2 + xf / r * (1.0 - 3.0 * m / r) * lam * f2 + base_coefficient(bg, r, params.source) * f2);
    (lhs, kx)
}

/// Time integrals up to one window end.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BulkReport {
    pub window: f64,
    pub lhs_gradient: f64,
    pub lhs_zeroth: f64,
    pub lhs_angular: f64,
    pub lhs: f64,
    pub k_int: f64,
    pub ratio_to_et0: f64,
    /// Smallest LHS density seen at any node and step up to this window.
    pub min_density: f64,
}

/// Accumulates the bulk integrals with the trapezoid rule over the steps
/// of the evolution, recording a [`BulkReport`] at each window end.
pub struct MorawetzObserver {
    params: ModeParams,
    wave: usize,
    deriv_order: u32,
    et0: f64,
    windows: Vec<f64>,
    acc: [f64; 4],
    last: Option<(f64, [f64; 4])>,
    min_density: f64,
    pub reports: Vec<BulkReport>,
}

impl MorawetzObserver {
    pub fn new(params: ModeParams, wave: usize, deriv_order: u32, et0: f64, mut windows: Vec<f64>) -> Self {
        windows.sort_by(|a, b| a.total_cmp(b));
        Self {
            params,
            wave,
            deriv_order,
            et0,
            windows,
            acc: [0.0; 4],
            last: None,
            min_density: f64::INFINITY,
            reports: Vec::new(),
        }
    }

    pub fn params(&self) -> &ModeParams {
        &self.params
    }

    fn slice_integrals(&mut self, table: &RadialTable, u: &[C]) -> [f64; 4] {
        let h = table.grid.h;
        let mut cols = vec![Vec::with_capacity(u.len()); 4];
        for (j, p) in table.points.iter().enumerate() {
            let us = d1(u, j, h, self.deriv_order);
            let f = u[j] / p.r;
            let fs = us / p.r - u[j] * (p.a / (p.r * p.r));
            let (lhs, kx) = morawetz_density(&table.bg, &self.params, p, f, fs);
            let total = lhs[0] + lhs[1] + lhs[2];
            self.min_density = self.min_density.min(total);
            cols[0].push(lhs[0]);
            cols[1].push(lhs[1]);
            cols[2].push(lhs[2]);
            cols[3].push(kx);
        }
        [trapezoid(h, &cols[0]), trapezoid(h, &cols[1]), trapezoid(h, &cols[2]), trapezoid(h, &cols[3])]
    }

    fn push(&mut self, ev: &Evolver<'_>) {
        let now = self.slice_integrals(ev.table, &ev.waves[self.wave].u);
        if let Some((t0, prev)) = self.last {
            let dt = (ev.t - t0).abs();
            for k in 0..4 {
                self.acc[k] += 0.5 * dt * (prev[k] + now[k]);
            }
        }
        self.last = Some((ev.t, now));
        let tol = 1e-9 * (1.0 + ev.t.abs());
        while let Some(&w) = self.windows.first() {
            if ev.t + tol < w {
                break;
            }
            self.windows.remove(0);
            let lhs = self.acc[0] + self.acc[1] + self.acc[2];
            self.reports.push(BulkReport {
                window: w,
                lhs_gradient: self.acc[0],
                lhs_zeroth: self.acc[1],
                lhs_angular: self.acc[2],
                lhs,
                k_int: self.acc[3],
                ratio_to_et0: if self.et0 > 0.0 { lhs / self.et0 } else { 0.0 },
                min_density: self.min_density,
            });
        }
    }
}

impl Observer for MorawetzObserver {
    fn start(&mut self, ev: &Evolver<'_>) -> Result<()> {
        self.push(ev);
        Ok(())
    }
    fn observe(&mut self, ev: &Evolver<'_>) -> Result<()> {
        self.push(ev);
        Ok(())
    }
}
