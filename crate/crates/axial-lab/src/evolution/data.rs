use super::{Grid, ModeField, RadialTable, Source};
use crate::error::{LabError, Result};
use crate::geometry::Schwarzschild;
use crate::harmonics::ModeIndex;
use crate::jet::{smooth_step, Jet};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Gaussian in `r*` multiplied by a C^∞ cutoff that is 1 on `|y| ≤ 6` and
/// vanishes for `|y| ≥ 8`, with `y = (r* − center)/width`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpProfile {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
}

impl BumpProfile {
    pub fn support(&self) -> (f64, f64) {
        (self.center - 8.0 * self.width, self.center + 8.0 * self.width)
    }

    pub fn jet(&self, r_star: f64) -> Jet {
        let y = (Jet::variable(r_star) + (-self.center)) * (1.0 / self.width);
        if y.v.abs() >= 8.0 || self.amplitude == 0.0 {
            return Jet::constant(0.0);
        }
        let gauss = (y * y * -0.5).exp() * self.amplitude;
        let cut = if y.v.abs() <= 6.0 {
            Jet::constant(1.0)
        } else {
            let ay = if y.v < 0.0 { -y } else { y };
            smooth_step((-ay + 8.0) * 0.5)
        };
        gauss * cut
    }
}

/// A radial profile of the section coefficient `f` (not of `u = r f`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Profile {
    Zero,
    GaussianBump(BumpProfile),
    /// The static lowest β mode `f = C₁/r²`.
    StaticBeta1 { c1: f64 },
    /// Samples `(r*, f)` interpolated linearly; derivatives come from the grid.
    CustomTable { points: Vec<(f64, f64)> },
}

impl Profile {
    /// Value and first two `r*` derivatives.
    pub fn jet(&self, bg: &Schwarzschild, r_star: f64) -> Jet {
        match self {
            Profile::Zero => Jet::constant(0.0),
            Profile::GaussianBump(b) => b.jet(r_star),
            Profile::StaticBeta1 { c1 } => {
                let p = bg.point_from_tortoise(r_star);
                let (r, m) = (p.r, bg.mass());
                Jet {
                    v: c1 / (r * r),
                    d: -2.0 * c1 * p.a / r.powi(3),
                    dd: p.a * c1 * (6.0 / r.powi(4) - 16.0 * m / r.powi(5)),
                }
            }
            Profile::CustomTable { points } => {
                let v = interpolate(points, r_star);
                Jet { v, d: f64::NAN, dd: f64::NAN }
            }
        }
    }

    /// Support in `r*`, or `None` when the profile is not compactly supported.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            Profile::Zero => Some((0.0, 0.0)),
            Profile::GaussianBump(b) if b.amplitude == 0.0 => Some((0.0, 0.0)),
            Profile::GaussianBump(b) => Some(b.support()),
            Profile::StaticBeta1 { .. } => None,
            Profile::CustomTable { points } => {
                let nz: Vec<f64> = points.iter().filter(|p| p.1 != 0.0).map(|p| p.0).collect();
                if nz.is_empty() {
                    Some((0.0, 0.0))
                } else {
                    Some((nz.iter().cloned().fold(f64::INFINITY, f64::min), nz.iter().cloned().fold(f64::NEG_INFINITY, f64::max)))
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Profile::Zero => true,
            Profile::GaussianBump(b) => b.amplitude == 0.0,
            Profile::StaticBeta1 { c1 } => *c1 == 0.0,
            Profile::CustomTable { points } => points.iter().all(|p| p.1 == 0.0),
        }
    }

    /// Samples on a grid.
    pub fn sample(&self, table: &RadialTable) -> Vec<Complex64> {
        (0..table.grid.n)
            .map(|j| Complex64::new(self.jet(&table.bg, table.grid.x(j)).v, 0.0))
            .collect()
    }

    pub fn check_support(&self, grid: &Grid) -> Result<()> {
        if let Some((lo, hi)) = self.support() {
            if self.is_zero() {
                return Ok(());
            }
            let margin = 10.0 * grid.h;
            if lo < grid.r_star_min + margin || hi > grid.r_star_max() - margin {
                return Err(LabError::Support { lo, hi, min: grid.r_star_min, max: grid.r_star_max() });
            }
        }
        Ok(())
    }
}

fn interpolate(points: &[(f64, f64)], x: f64) -> f64 {
    if points.is_empty() || x < points[0].0 || x > points[points.len() - 1].0 {
        return 0.0;
    }
    let k = points.partition_point(|p| p.0 <= x).clamp(1, points.len() - 1);
    let (x0, y0) = points[k - 1];
    let (x1, y1) = points[k];
    if x1 == x0 {
        return y0;
    }
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Initial data for a single mode: independent profiles for `f` and `f_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub f: Profile,
    #[serde(default = "zero_profile")]
    pub f_t: Profile,
}

fn zero_profile() -> Profile {
    Profile::Zero
}

impl InitialData {
    pub fn make(&self, table: &RadialTable, mode: ModeIndex, source: Source) -> Result<ModeField> {
        if mode.s != source.spin() {
            return Err(LabError::Mode { s: mode.s, l: mode.l, reason: "spin does not match the source field" });
        }
        self.f.check_support(&table.grid)?;
        self.f_t.check_support(&table.grid)?;
        Ok(ModeField {
            mode,
            source,
            grid: table.grid,
            f: self.f.sample(table),
            f_t: self.f_t.sample(table),
            time: 0.0,
        })
    }
}
