//! Per-mode 1+1 Regge–Wheeler evolution in `(t, r*)`.
//!
//! With `u = r f` both the α equation (potential `V = 4A/r²`) and the β
//! equation (potential `W = (1 − 8M/r)/r²`) reduce to
//! `u_tt = u_{r*r*} − A(ℓ(ℓ+1)/r² − 6M/r³) u`.

mod data;
mod observe;
mod solver;

pub use data::{BumpProfile, InitialData, Profile};
pub use observe::{FlatSnapshot, FlatWave, Observer, SliceCapture, SlicePoint, SnapshotRecorder};
pub use solver::{Evolver, GammaLink, Wave};

use crate::error::{LabError, Result};
use crate::geometry::{RadialPoint, Schwarzschild};
use crate::harmonics::ModeIndex;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Which connection quantity a mode belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Alpha,
    Beta,
}

impl Source {
    pub fn spin(self) -> u32 {
        match self {
            Source::Alpha => 2,
            Source::Beta => 1,
        }
    }

    /// The Regge–Wheeler potential of the field: `V = 4A/r²` or `W = (1 − 8M/r)/r²`.
    pub fn potential(self, bg: &Schwarzschild, p: &RadialPoint) -> f64 {
        let r2 = p.r * p.r;
        match self {
            Source::Alpha => 4.0 * p.a / r2,
            Source::Beta => (1.0 - 8.0 * bg.mass() / p.r) / r2,
        }
    }

    /// `dP/dr`.
    pub fn potential_dr(self, bg: &Schwarzschild, r: f64) -> f64 {
        let m = bg.mass();
        match self {
            Source::Alpha => 8.0 * (3.0 * m - r) / r.powi(4),
            Source::Beta => 2.0 * (12.0 * m - r) / r.powi(4),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Source::Alpha => "alpha",
            Source::Beta => "beta",
        }
    }
}

/// Finite-difference order used in space (and by the matching time integrator).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    /// Velocity-Verlet leapfrog with the 3-point Laplacian.
    Second,
    /// Classical RK4 with the 5-point Laplacian.
    Fourth,
}

impl Scheme {
    pub fn from_order(order: u32) -> Result<Self> {
        match order {
            2 => Ok(Scheme::Second),
            4 => Ok(Scheme::Fourth),
            _ => Err(LabError::Config(format!("scheme must be 2 or 4, got {order}"))),
        }
    }

    pub fn order(self) -> u32 {
        match self {
            Scheme::Second => 2,
            Scheme::Fourth => 4,
        }
    }

    pub fn half_width(self) -> usize {
        match self {
            Scheme::Second => 1,
            Scheme::Fourth => 2,
        }
    }
}

/// Uniform grid `r*_j = r*_min + j h`, `j = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub r_star_min: f64,
    pub h: f64,
    pub n: usize,
}

impl Grid {
    /// Grid covering `[r*_min, r*_max]` (the right end is rounded to a node).
    pub fn new(r_star_min: f64, r_star_max: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) || !(r_star_max > r_star_min + 8.0 * h) {
            return Err(LabError::Config(format!(
                "grid [{r_star_min}, {r_star_max}] with spacing {h} is empty"
            )));
        }
        let n = ((r_star_max - r_star_min) / h).round() as usize + 1;
        Ok(Self { r_star_min, h, n })
    }

    pub fn x(&self, j: usize) -> f64 {
        self.r_star_min + j as f64 * self.h
    }

    pub fn r_star_max(&self) -> f64 {
        self.x(self.n - 1)
    }

    /// Index of the node nearest to `r*`, clamped to the grid.
    pub fn nearest(&self, r_star: f64) -> usize {
        (((r_star - self.r_star_min) / self.h).round().max(0.0) as usize).min(self.n - 1)
    }
}

/// Background quantities at every grid node.
#[derive(Debug, Clone)]
pub struct RadialTable {
    pub grid: Grid,
    pub bg: Schwarzschild,
    pub points: Vec<RadialPoint>,
}

impl RadialTable {
    pub fn new(bg: &Schwarzschild, grid: Grid) -> Self {
        let points = (0..grid.n).map(|j| bg.point_from_tortoise(grid.x(j))).collect();
        Self { grid, bg: *bg, points }
    }

    pub fn r(&self, j: usize) -> f64 {
        self.points[j].r
    }
}

/// `V_eff = A (ℓ(ℓ+1)/r² − 6M/r³)`.
pub fn reduced_potential_at(bg: &Schwarzschild, l: u32, p: &RadialPoint) -> f64 {
    let ll = (l * (l + 1)) as f64;
    p.a * (ll / (p.r * p.r) - 6.0 * bg.mass() / p.r.powi(3))
}

/// Reduced potential samples for one mode.
#[derive(Debug, Clone, Serialize)]
pub struct ReducedPotential {
    pub l: u32,
    pub source: Source,
    pub values: Vec<f64>,
}

pub fn reduced_potential(table: &RadialTable, mode: ModeIndex, source: Source) -> Result<ReducedPotential> {
    if mode.s != source.spin() {
        return Err(LabError::Mode { s: mode.s, l: mode.l, reason: "spin does not match the source field" });
    }
    if source == Source::Alpha && mode.l < 2 {
        return Err(LabError::Mode { s: mode.s, l: mode.l, reason: "alpha has no l < 2 content" });
    }
    let values = table.points.iter().map(|p| reduced_potential_at(&table.bg, mode.l, p)).collect();
    Ok(ReducedPotential { l: mode.l, source, values })
}

/// Central first derivative of the given order (2, 4, 8) at node `j`.
/// Near the ends the order drops to whatever fits.
pub fn d1<T>(u: &[T], j: usize, h: f64, order: u32) -> T
where
    T: Copy + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
{
    let n = u.len();
    let room = j.min(n - 1 - j);
    let k = ((order / 2) as usize).min(room);
    match k {
        0 => {
            if j == 0 {
                (u[1] - u[0]) * (1.0 / h)
            } else {
                (u[j] - u[j - 1]) * (1.0 / h)
            }
        }
        1 => (u[j + 1] - u[j - 1]) * (0.5 / h),
        2 | 3 => ((u[j + 1] - u[j - 1]) * 8.0 - (u[j + 2] - u[j - 2])) * (1.0 / (12.0 * h)),
        _ => {
            let c = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
            let mut acc = (u[j + 1] - u[j - 1]) * c[0];
            for (m, cm) in c.iter().enumerate().skip(1) {
                acc = acc + (u[j + m + 1] - u[j - m - 1]) * *cm;
            }
            acc * (1.0 / h)
        }
    }
}

/// Central second derivative of order 2 or 4 at an interior node.
pub fn d2<T>(u: &[T], j: usize, h: f64, order: u32) -> T
where
    T: Copy + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
{
    let ih2 = 1.0 / (h * h);
    if order >= 4 {
        (u[j + 1] + u[j - 1]) * (16.0 / 12.0 * ih2) - (u[j + 2] + u[j - 2]) * (ih2 / 12.0) - u[j] * (30.0 / 12.0 * ih2)
    } else {
        (u[j + 1] + u[j - 1] - u[j] * 2.0) * ih2
    }
}

/// One angular mode of a bundle section: `f` and `f_t` on the `r*` grid.
#[derive(Debug, Clone)]
pub struct ModeField {
    pub mode: ModeIndex,
    pub source: Source,
    pub grid: Grid,
    pub f: Vec<Complex64>,
    pub f_t: Vec<Complex64>,
    pub time: f64,
}

impl ModeField {
    pub fn zero(mode: ModeIndex, source: Source, grid: Grid) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); grid.n];
        Self { mode, source, grid, f: z.clone(), f_t: z, time: 0.0 }
    }

    /// `(u, u_t) = (r f, r f_t)`.
    pub fn to_wave(&self, table: &RadialTable) -> (Vec<Complex64>, Vec<Complex64>) {
        let u = self.f.iter().zip(&table.points).map(|(f, p)| f * p.r).collect();
        let v = self.f_t.iter().zip(&table.points).map(|(f, p)| f * p.r).collect();
        (u, v)
    }
}

/// Maximum CFL number accepted by [`evolve_mode`].
pub const CFL_MAX: f64 = 0.9;

/// Evolves a single mode to `t_final` and returns flat snapshots at the
/// requested times (rounded to the nearest step).
pub fn evolve_mode(
    table: &RadialTable,
    field: &ModeField,
    scheme: Scheme,
    t_final: f64,
    dt: f64,
    snapshot_times: &[f64],
) -> Result<Vec<FlatSnapshot>> {
    check_cfl(dt, table.grid.h)?;
    let pot = reduced_potential(table, field.mode, field.source)?;
    let (u, v) = field.to_wave(table);
    let mut ev = Evolver::new(table, scheme, vec![Wave::new(u, v, pot.values)], None, field.time)?;
    let mut rec = SnapshotRecorder::new(snapshot_times.to_vec(), dt, 8);
    ev.run(t_final, dt, &mut [&mut rec])?;
    Ok(rec.into_snapshots())
}

pub fn check_cfl(dt: f64, h: f64) -> Result<()> {
    if !(dt.abs() > 0.0) || dt.abs() > CFL_MAX * h {
        return Err(LabError::Cfl { dt, h, limit: CFL_MAX * h });
    }
    Ok(())
}
