//! Schwarzschild exterior: metric functions, tortoise/null coordinates and
//! the two slicing families used for energy fluxes.

use crate::error::{LabError, Result};
use crate::quad::GaussLegendre;
use serde::Serialize;

/// The Schwarzschild background of mass `M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Schwarzschild {
    m: f64,
}

/// A radius together with `x = r - 2M`, kept separately so that `A = x/r`
/// stays accurate when `r` is indistinguishable from `2M` in floating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialPoint {
    pub r: f64,
    pub x: f64,
    pub a: f64,
    pub mu: f64,
}

/// Values of `t*`, `u`, `v` (and `r*`) at an event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordinateMaps {
    pub r_star: f64,
    pub t_star: f64,
    pub u: f64,
    pub v: f64,
}

impl Schwarzschild {
    pub fn new(m: f64) -> Result<Self> {
        if !(m > 0.0) || !m.is_finite() {
            return Err(LabError::Mass(m));
        }
        Ok(Self { m })
    }

    pub fn mass(&self) -> f64 {
        self.m
    }

    pub fn horizon(&self) -> f64 {
        2.0 * self.m
    }

    pub fn mu(&self, r: f64) -> f64 {
        2.0 * self.m / r
    }

    pub fn a(&self, r: f64) -> f64 {
        1.0 - 2.0 * self.m / r
    }

    pub fn delta(&self, r: f64) -> f64 {
        r * r - 2.0 * self.m * r
    }

    /// `ν = ½ log(1 − μ)`.
    pub fn nu(&self, r: f64) -> f64 {
        0.5 * self.a(r).ln()
    }

    /// `μ₂ = −½ log(1 − μ)`.
    pub fn mu2(&self, r: f64) -> f64 {
        -0.5 * self.a(r).ln()
    }

    /// `μ₃ = log r`.
    pub fn mu3(&self, r: f64) -> f64 {
        r.ln()
    }

    /// `ψ = log(r sin θ)`.
    pub fn psi(&self, r: f64, theta: f64) -> f64 {
        (r * theta.sin()).ln()
    }

    /// Surface gravity `κ = 1/(4M)`.
    pub fn surface_gravity(&self) -> f64 {
        0.25 / self.m
    }

    fn check(&self, r: f64) -> Result<()> {
        if r > 2.0 * self.m && r.is_finite() {
            Ok(())
        } else {
            Err(LabError::Domain { r, horizon: 2.0 * self.m })
        }
    }

    pub fn point(&self, r: f64) -> Result<RadialPoint> {
        self.check(r)?;
        let x = r - 2.0 * self.m;
        Ok(RadialPoint { r, x, a: x / r, mu: 2.0 * self.m / r })
    }

    /// `r* = r + 2M ln(r − 2M) − 3M − 2M ln M`.
    pub fn tortoise(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        let m = self.m;
        Ok(r + 2.0 * m * (r - 2.0 * m).ln() - 3.0 * m - 2.0 * m * m.ln())
    }

    /// Inverse of [`Self::tortoise`], returned as a [`RadialPoint`].
    ///
    /// Writing `r − 2M = M e^y` turns the map into `M e^y + 2M y − M = r*`,
    /// which is solved by Newton's method inside a bisection bracket.
    pub fn point_from_tortoise(&self, r_star: f64) -> RadialPoint {
        let m = self.m;
        let g = |y: f64| m * y.exp() + 2.0 * m * y - m - r_star;
        let s = r_star + m;
        let mut hi = s / (2.0 * m);
        let mut lo = if s > 0.0 { (s / (2.0 * m)).ln().min(s / (4.0 * m)) } else { hi - 1.0 };
        let mut y = if s > 4.0 * m { (s / m).ln() } else { 0.5 * (lo + hi) };
        for _ in 0..200 {
            let val = g(y);
            if val > 0.0 {
                hi = y;
            } else {
                lo = y;
            }
            let step = val / (m * y.exp() + 2.0 * m);
            let mut next = y - step;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let done = (next - y).abs() <= 1e-15 * (1.0 + y.abs());
            y = next;
            if done || hi - lo <= 1e-15 * (1.0 + y.abs()) {
                break;
            }
        }
        let x = m * y.exp();
        let r = 2.0 * m + x;
        RadialPoint { r, x, a: x / r, mu: 2.0 * m / r }
    }

    pub fn r_from_tortoise(&self, r_star: f64) -> f64 {
        self.point_from_tortoise(r_star).r
    }

    /// `t* = t + 2M ln(r − 2M)`, `u = (t − r*)/2`, `v = (t + r*)/2`.
    pub fn coordinate_maps(&self, t: f64, r: f64) -> Result<CoordinateMaps> {
        let r_star = self.tortoise(r)?;
        Ok(CoordinateMaps {
            r_star,
            t_star: t + 2.0 * self.m * (r - 2.0 * self.m).ln(),
            u: 0.5 * (t - r_star),
            v: 0.5 * (t + r_star),
        })
    }

    /// The constant `t* − t − (r* − r) = 3M + 2M ln M` between the two offset
    /// conventions.
    pub fn offset_difference(&self) -> f64 {
        3.0 * self.m + 2.0 * self.m * self.m.ln()
    }

    /// Height function of `Σ_τ = {t* = τ}` written as `t = τ + h(r*)`.
    pub fn sigma_height(&self, p: &RadialPoint) -> (f64, f64) {
        (-2.0 * self.m * p.x.ln(), -p.mu)
    }
}

/// One row of a tabulated height function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FoliationRow {
    pub r: f64,
    pub r_star: f64,
    pub h: f64,
    pub h_prime: f64,
}

/// The hyperboloidal-type slices `Σ̃_τ = {t = τ + h(r*)}`.
///
/// Inside `r ≤ 3M` the height is `−2M ln(r − 2M) − c0`; outside `r ≥ 20M` it is
/// `√(r² + 1) − c1`. In between the slopes are blended with a C² quintic
/// ramp in `r`, so `|h'|` never exceeds the larger of the two branch slopes.
#[derive(Debug, Clone, Serialize)]
pub struct FoliationSpec {
    pub c0: f64,
    pub c1: f64,
    /// `min(1 − |h'|)` over the sampled window.
    pub spacelike_margin: f64,
    /// `min(h − |r*|)` over the sampled window; nonnegative means `t ∓ r* ≥ τ`.
    pub null_margin: f64,
    pub table: Vec<FoliationRow>,
    #[serde(skip)]
    bg: Option<Schwarzschild>,
    #[serde(skip)]
    h_inner_join: f64,
}

const BLEND_LO: f64 = 3.0;
const BLEND_HI: f64 = 20.0;

fn ramp(y: f64) -> f64 {
    let y = y.clamp(0.0, 1.0);
    y * y * y * (10.0 - 15.0 * y + 6.0 * y * y)
}

impl FoliationSpec {
    fn bg(&self) -> &Schwarzschild {
        self.bg.as_ref().expect("foliation carries its background")
    }

    /// `(1 + h', 1 − h')` evaluated without cancellation.
    fn slopes(bg: &Schwarzschild, p: &RadialPoint) -> (f64, f64) {
        let m = bg.mass();
        let w = ramp((p.r - BLEND_LO * m) / ((BLEND_HI - BLEND_LO) * m));
        let s = (p.r * p.r + 1.0).sqrt();
        let h2 = p.a * p.r / s;
        let (in_plus, in_minus) = (p.a, 1.0 + p.mu);
        let (out_plus, out_minus) = (1.0 + h2, (s - p.r + 2.0 * m) / s);
        (
            (1.0 - w) * in_plus + w * out_plus,
            (1.0 - w) * in_minus + w * out_minus,
        )
    }

    fn slope(bg: &Schwarzschild, p: &RadialPoint) -> f64 {
        let (plus, minus) = Self::slopes(bg, p);
        0.5 * (plus - minus)
    }

    /// `∫ h' dr*` from `3M` to `r` (for `3M ≤ r ≤ 20M`), done in `r` with `dr* = dr/A`.
    fn blend_integral(bg: &Schwarzschild, r: f64) -> f64 {
        let m = bg.mass();
        let lo = BLEND_LO * m;
        if r <= lo {
            return 0.0;
        }
        let gl = GaussLegendre::new(24);
        let panels = 8;
        let w = (r - lo) / panels as f64;
        let mut total = 0.0;
        for k in 0..panels {
            let a = lo + k as f64 * w;
            total += gl.integrate(a, a + w, |rr| {
                let p = bg.point(rr).expect("blend region lies outside the horizon");
                Self::slope(bg, &p) / p.a
            });
        }
        total
    }

    /// `(h, h')` at a radius.
    pub fn height(&self, p: &RadialPoint) -> (f64, f64) {
        let bg = self.bg();
        let m = bg.mass();
        if p.r <= BLEND_LO * m {
            (-2.0 * m * p.x.ln() - self.c0, -p.mu)
        } else if p.r >= BLEND_HI * m {
            ((p.r * p.r + 1.0).sqrt() - self.c1, p.a * p.r / (p.r * p.r + 1.0).sqrt())
        } else {
            (self.h_inner_join + Self::blend_integral(bg, p.r), Self::slope(bg, p))
        }
    }
}

/// Builds the `Σ̃_τ` height function on the window `[r*_min, r*_max]`, sampled
/// with spacing `dr`. The offsets are the largest ones for which `h ≥ |r*|`
/// holds on the whole window.
pub fn build_foliation(bg: &Schwarzschild, r_star_min: f64, r_star_max: f64, dr: f64) -> Result<FoliationSpec> {
    if !(r_star_max > r_star_min) || !(dr > 0.0) {
        return Err(LabError::Construction("empty foliation window".into()));
    }
    let m = bg.mass();
    let join = bg.point(BLEND_LO * m)?;
    let outer = bg.point(BLEND_HI * m)?;
    let blend = FoliationSpec::blend_integral(bg, BLEND_HI * m);
    let mut spec = FoliationSpec {
        c0: -m - 2.0 * m * m.ln(),
        c1: 0.0,
        spacelike_margin: 0.0,
        null_margin: 0.0,
        table: Vec::new(),
        bg: Some(*bg),
        h_inner_join: 0.0,
    };
    let fix = |spec: &mut FoliationSpec| {
        spec.h_inner_join = -2.0 * m * join.x.ln() - spec.c0;
        spec.c1 = (outer.r * outer.r + 1.0).sqrt() - (spec.h_inner_join + blend);
    };
    fix(&mut spec);

    let n = ((r_star_max - r_star_min) / dr).floor() as usize + 1;
    let points: Vec<(f64, RadialPoint)> = (0..n)
        .map(|i| {
            let rs = r_star_min + i as f64 * dr;
            (rs, bg.point_from_tortoise(rs))
        })
        .collect();
    let deficit = points
        .iter()
        .map(|(rs, p)| spec.height(p).0 - rs.abs())
        .fold(f64::INFINITY, f64::min);
    if deficit < 0.0 {
        spec.c0 += deficit;
        fix(&mut spec);
    }

    let mut margin = f64::INFINITY;
    let mut null_margin = f64::INFINITY;
    for (rs, p) in &points {
        let (plus, minus) = FoliationSpec::slopes(bg, p);
        let (h, hp) = spec.height(p);
        margin = margin.min(plus.min(minus));
        null_margin = null_margin.min(h - rs.abs());
        if plus <= 0.0 || minus <= 0.0 {
            return Err(LabError::NotSpacelike { r_star: *rs, slope: hp });
        }
        spec.table.push(FoliationRow { r: p.r, r_star: *rs, h, h_prime: hp });
    }
    spec.spacelike_margin = margin;
    spec.null_margin = null_margin;
    Ok(spec)
}
