//! Energies of the conformal multiplier `Z = u²∂_u + v²∂_v` on `{t = τ}`.

use super::{stress, trapezoid, ModeParams};
use crate::evolution::{FlatWave, RadialTable};
use crate::geometry::Schwarzschild;
use serde::Serialize;

/// `E^Z`, or `E^{Z,ω}` when `weighted`, where the weighted current adds
/// `¼ω∇|f|² − ¼(∇ω)|f|²` with `ω = 2 t r* A / r`.
pub fn z_energy(table: &RadialTable, params: &ModeParams, wave: &FlatWave, t: f64, weighted: bool) -> f64 {
    let dens: Vec<f64> = table
        .points
        .iter()
        .enumerate()
        .map(|(j, p)| {
            let x = table.grid.x(j);
            let s = stress(params, &table.bg, p, wave.f[j], wave.f_t[j], wave.f_s[j]);
            let mut d = s.tt * 0.5 * (t * t + x * x) + s.ts * t * x;
            if weighted {
                let f = wave.f[j];
                d += p.a * x / p.r * (t * (f.conj() * wave.f_t[j]).re - 0.5 * f.norm_sqr());
            }
            p.r * p.r * d
        })
        .collect();
    trapezoid(table.grid.h, &dens)
}

/// `E^{Z,ω}` from the rewritten density with `S = 2(t∂_t + r*∂_{r*})` and
/// `S̄ = 2(t∂_{r*} + r*∂_t)`:
/// `½[(μ/8)(|Sf|² + |S̄f|²) + (u² + v²)A(Λ/r² + P)|f|²
///   + (A/2)(|½Sf + (r*/r)f|² + |½S̄f + (t/r)f|²)]`.
pub fn z_energy_decomposed(table: &RadialTable, params: &ModeParams, wave: &FlatWave, t: f64) -> f64 {
    let dens: Vec<f64> = table
        .points
        .iter()
        .enumerate()
        .map(|(j, p)| {
            let x = table.grid.x(j);
            let (f, ft, fs) = (wave.f[j], wave.f_t[j], wave.f_s[j]);
            let s = (ft * t + fs * x) * 2.0;
            let sb = (fs * t + ft * x) * 2.0;
            let uv = 0.5 * (t * t + x * x);
            let q = params.q(&table.bg, p);
            let d = p.mu / 8.0 * (s.norm_sqr() + sb.norm_sqr())
                + uv * p.a * q * f.norm_sqr()
                + 0.5 * p.a * ((s * 0.5 + f * (x / p.r)).norm_sqr() + (sb * 0.5 + f * (t / p.r)).norm_sqr());
            p.r * p.r * 0.5 * d
        })
        .collect();
    trapezoid(table.grid.h, &dens)
}

/// `(2r − 8M) log((r − 2M)/M) − 7r + 12M`, the factor deciding the sign
/// of the weighted `Z` bulk coefficient for `t > 0`.
fn sign_factor(bg: &Schwarzschild, r: f64) -> f64 {
    let m = bg.mass();
    (2.0 * r - 8.0 * m) * ((r - 2.0 * m) / m).ln() - 7.0 * r + 12.0 * m
}

/// `4Mt(r − 2M)/r⁵ ((2r − 8M) log((r − 2M)/M) − 7r + 12M)`.
pub fn z_coefficient(bg: &Schwarzschild, r: f64, t: f64) -> f64 {
    let m = bg.mass();
    4.0 * m * t * (r - 2.0 * m) / r.powi(5) * sign_factor(bg, r)
}

/// The coefficient is negative (for `t > 0`) exactly on `(r′, R′)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ZBracket {
    pub r_inner: f64,
    pub r_outer: f64,
    /// Sign of the factor just outside the horizon, at `r = 4M` and far out.
    pub near_horizon_positive: bool,
    pub at_4m: f64,
    pub far_positive: bool,
    /// Dense sampling found no sign change outside the two roots.
    pub sampling_consistent: bool,
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn zcoef_sign_scan(bg: &Schwarzschild) -> ZBracket {
    let m = bg.mass();
    let g = |r: f64| sign_factor(bg, r);
    let near = 2.0 * m + 1e-9 * m;
    let mut far = 8.0 * m;
    while g(far) <= 0.0 {
        far *= 2.0;
    }
    let r_inner = bisect(g, near, 4.0 * m);
    let r_outer = bisect(g, 4.0 * m, far);
    let samples = 20_000;
    let consistent = (1..samples).all(|i| {
        let r = 2.0 * m + (4.0 * far - 2.0 * m) * i as f64 / samples as f64;
        let v = g(r);
        let inside = r > r_inner && r < r_outer;
        v == 0.0 || (v < 0.0) == inside || (r - r_inner).abs() < 1e-9 || (r - r_outer).abs() < 1e-9
    });
    ZBracket {
        r_inner,
        r_outer,
        near_horizon_positive: g(near) > 0.0,
        at_4m: g(4.0 * m),
        far_positive: g(1e6 * m) > 0.0,
        sampling_consistent: consistent,
    }
}
