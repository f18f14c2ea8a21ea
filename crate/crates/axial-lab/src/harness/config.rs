//! Run configuration: a TOML document with one section per concern.
//!
//! ```toml
//! study = "evolve"          # evolve | verify | decay | converge | normalize-kerr
//! mass = 1.0
//! scheme = 2                # 2 (leapfrog) or 4 (RK4 with fourth-order stencils)
//!
//! [grid]
//! r_star_min = -300.0
//! r_star_max = 300.0
//! h = 0.1
//!
//! [time]
//! t_final = 100.0
//! cfl = 0.5                 # or dt = 0.05
//! snapshot_every = 10.0
//!
//! [[modes]]
//! field = "alpha"           # alpha | beta | coupled
//! l = 2
//! f = { kind = "gaussian-bump", amplitude = 1.0, center = 10.0, width = 2.0 }
//! ```

use crate::error::{LabError, Result};
use crate::evolution::{Grid, Profile, Scheme, Source, CFL_MAX};
use crate::geometry::Schwarzschild;
use crate::harmonics::ModeIndex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StudyKind {
    Evolve,
    Verify,
    Decay,
    Converge,
    NormalizeKerr,
}

impl StudyKind {
    pub fn name(self) -> &'static str {
        match self {
            StudyKind::Evolve => "evolve",
            StudyKind::Verify => "verify",
            StudyKind::Decay => "decay",
            StudyKind::Converge => "converge",
            StudyKind::NormalizeKerr => "normalize-kerr",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub r_star_min: f64,
    pub r_star_max: f64,
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_final: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cfl: Option<f64>,
    #[serde(default = "default_snapshot_every")]
    pub snapshot_every: f64,
}

fn default_snapshot_every() -> f64 {
    10.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldKind {
    Alpha,
    Beta,
    Coupled,
}

/// One `ℓ` of one field. Single fields take `f` and `f_t`; the coupled
/// system takes free `alpha` and `beta` profiles at `t = 0` and derives the
/// rest from the constraints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    pub field: FieldKind,
    pub l: u32,
    #[serde(default = "zero", skip_serializing_if = "Profile::is_zero")]
    pub f: Profile,
    #[serde(default = "zero", skip_serializing_if = "Profile::is_zero")]
    pub f_t: Profile,
    #[serde(default = "zero", skip_serializing_if = "Profile::is_zero")]
    pub alpha: Profile,
    #[serde(default = "zero", skip_serializing_if = "Profile::is_zero")]
    pub beta: Profile,
}

fn zero() -> Profile {
    Profile::Zero
}

impl ModeConfig {
    /// The RW fields this mode evolves, in wave order.
    pub fn sources(&self) -> Vec<Source> {
        match self.field {
            FieldKind::Alpha => vec![Source::Alpha],
            FieldKind::Beta => vec![Source::Beta],
            FieldKind::Coupled => vec![Source::Alpha, Source::Beta],
        }
    }

    pub fn tag(&self) -> String {
        let f = match self.field {
            FieldKind::Alpha => "alpha",
            FieldKind::Beta => "beta",
            FieldKind::Coupled => "coupled",
        };
        format!("{f}_l{}", self.l)
    }

    fn profiles(&self) -> [&Profile; 4] {
        [&self.f, &self.f_t, &self.alpha, &self.beta]
    }

    pub fn is_zero(&self) -> bool {
        self.profiles().iter().all(|p| p.is_zero())
    }

    /// The lowest `β` mode is normalized away, not decayed.
    pub fn excluded_from_decay(&self) -> bool {
        self.l == 1 && matches!(self.field, FieldKind::Beta | FieldKind::Coupled)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(LabError::Config(format!("mode {}: {msg}", self.tag())));
        match self.field {
            FieldKind::Alpha | FieldKind::Beta => {
                let s = self.sources()[0].spin();
                if let Err(e) = ModeIndex::new(s, self.l) {
                    return bad(e.to_string());
                }
                if !self.alpha.is_zero() || !self.beta.is_zero() {
                    return bad("single-field modes take `f` and `f_t`, not `alpha`/`beta`".into());
                }
            }
            FieldKind::Coupled => {
                if self.l == 0 {
                    return bad("the coupled system starts at l = 1".into());
                }
                if self.l == 1 && !self.alpha.is_zero() {
                    return bad("alpha has no l = 1 mode".into());
                }
                if !self.f.is_zero() || !self.f_t.is_zero() {
                    return bad("coupled modes take `alpha` and `beta`, not `f`/`f_t`".into());
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FoliationConfig {
    /// Decay claims are evaluated on `[tau_min, tau_max]`.
    pub tau_min: f64,
    pub tau_max: f64,
    /// Boundedness of `E^N(Σ_τ)` is evaluated on `[0, bound_tau_max]`.
    pub bound_tau_max: f64,
    pub tau_step: f64,
    /// Graph slices stop where `1 − 2M/r` drops below this.
    pub a_min: f64,
}

impl Default for FoliationConfig {
    fn default() -> Self {
        Self { tau_min: 20.0, tau_max: 200.0, bound_tau_max: 200.0, tau_step: 5.0, a_min: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeConfig {
    /// Three spacings, each half the previous.
    pub h: Vec<f64>,
}

impl Default for ConvergeConfig {
    fn default() -> Self {
        Self { h: vec![0.2, 0.1, 0.05] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KerrConfig {
    /// Synthetic `β₁ = c1/r² + c2 φ₂(r)`.
    pub c1: f64,
    #[serde(default)]
    pub c2: f64,
}

impl Default for KerrConfig {
    fn default() -> Self {
        Self { c1: 3.0, c2: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorawetzConfig {
    /// Window ends `T` for the bulk integrals over `[0, T]`.
    pub windows: Vec<f64>,
}

impl Default for MorawetzConfig {
    fn default() -> Self {
        Self { windows: vec![50.0, 100.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub study: StudyKind,
    #[serde(default = "unit_mass")]
    pub mass: f64,
    #[serde(default = "default_scheme")]
    pub scheme: u32,
    pub grid: GridConfig,
    pub time: TimeConfig,
    #[serde(default)]
    pub modes: Vec<ModeConfig>,
    #[serde(default)]
    pub foliation: FoliationConfig,
    #[serde(default)]
    pub converge: ConvergeConfig,
    #[serde(default)]
    pub kerr: KerrConfig,
    #[serde(default)]
    pub morawetz: MorawetzConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

fn unit_mass() -> f64 {
    1.0
}

fn default_scheme() -> u32 {
    2
}

/// Margin between the reach of the data and the frozen end nodes, in units of `h`.
const END_MARGIN: f64 = 24.0;

impl RunConfig {
    /// The baseline run: an `ℓ = 2` α bump on `[−300M, 300M]` with
    /// `h = 0.1M` and CFL 0.5.
    pub fn baseline(study: StudyKind) -> Self {
        let bump = crate::evolution::BumpProfile { amplitude: 1.0, center: 10.0, width: 2.0 };
        let (grid, t_final, windows) = match study {
            StudyKind::Decay => (GridConfig { r_star_min: -500.0, r_star_max: 500.0, h: 0.1 }, 450.0, vec![100.0, 200.0, 400.0]),
            _ => (GridConfig { r_star_min: -300.0, r_star_max: 300.0, h: 0.1 }, 100.0, vec![50.0, 100.0]),
        };
        Self {
            study,
            mass: 1.0,
            scheme: 2,
            grid,
            time: TimeConfig { t_final, dt: None, cfl: Some(0.5), snapshot_every: 10.0 },
            modes: vec![ModeConfig {
                field: FieldKind::Alpha,
                l: 2,
                f: Profile::GaussianBump(bump),
                f_t: Profile::Zero,
                alpha: Profile::Zero,
                beta: Profile::Zero,
            }],
            foliation: FoliationConfig::default(),
            converge: ConvergeConfig::default(),
            kerr: KerrConfig::default(),
            morawetz: MorawetzConfig { windows },
            output: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| LabError::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| LabError::Config(e.to_string()))
    }

    /// SHA-256 of the canonical TOML form.
    pub fn hash(&self) -> Result<String> {
        let digest = Sha256::digest(self.to_toml()?.as_bytes());
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }

    pub fn background(&self) -> Result<Schwarzschild> {
        Schwarzschild::new(self.mass)
    }

    pub fn scheme(&self) -> Result<Scheme> {
        Scheme::from_order(self.scheme)
    }

    pub fn grid_with(&self, h: f64) -> Result<Grid> {
        Grid::new(self.grid.r_star_min, self.grid.r_star_max, h)
    }

    /// Time step for spacing `h`: `dt` as given, or `cfl · h`.
    pub fn dt_for(&self, h: f64) -> f64 {
        match (self.time.dt, self.time.cfl) {
            (Some(dt), _) => dt * h / self.grid.h,
            (None, Some(c)) => c * h,
            (None, None) => 0.5 * h,
        }
    }

    /// Spacings the study runs at.
    pub fn spacings(&self) -> Vec<f64> {
        match self.study {
            StudyKind::Converge => self.converge.h.clone(),
            _ => vec![self.grid.h],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(LabError::Config(msg.to_string()));
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return bad("mass must be positive");
        }
        if Scheme::from_order(self.scheme).is_err() {
            return bad("scheme must be 2 or 4");
        }
        let g = &self.grid;
        if !(g.r_star_min.is_finite() && g.r_star_max.is_finite() && g.r_star_min < g.r_star_max) {
            return bad("grid needs r_star_min < r_star_max");
        }
        if !(g.h.is_finite() && g.h > 0.0) {
            return bad("grid spacing h must be positive");
        }
        let t = &self.time;
        if !(t.t_final.is_finite() && t.t_final > 0.0) {
            return bad("t_final must be positive");
        }
        if !(t.snapshot_every.is_finite() && t.snapshot_every > 0.0) {
            return bad("snapshot_every must be positive");
        }
        if let Some(c) = t.cfl {
            if !(c > 0.0 && c <= CFL_MAX) {
                return Err(LabError::Config(format!("cfl must lie in (0, {CFL_MAX}]")));
            }
        }
        if let Some(dt) = t.dt {
            if !(dt > 0.0 && dt <= CFL_MAX * g.h) {
                return Err(LabError::Config(format!("dt must lie in (0, {}]", CFL_MAX * g.h)));
            }
        }
        let needs_modes = matches!(self.study, StudyKind::Evolve | StudyKind::Decay | StudyKind::Converge);
        if needs_modes && self.modes.is_empty() {
            return bad("at least one [[modes]] entry is required");
        }
        for m in &self.modes {
            m.validate()?;
        }
        if self.study == StudyKind::Converge {
            let h = &self.converge.h;
            if h.len() != 3 {
                return bad("converge.h must list three spacings");
            }
            for w in h.windows(2) {
                if !(w[1] > 0.0) || ((w[0] / w[1]) - 2.0).abs() > 1e-9 {
                    return bad("converge.h must halve at each level");
                }
            }
            let n = (g.r_star_max - g.r_star_min) / h[0];
            if (n - n.round()).abs() > 1e-6 {
                return bad("the grid window must be a whole number of coarse cells");
            }
        }
        if self.study == StudyKind::Decay {
            let f = &self.foliation;
            if t.t_final < 250.0 * self.mass {
                return bad("decay studies need t_final >= 250M");
            }
            if !(f.tau_step > 0.0 && f.tau_min >= 0.0 && f.tau_min < f.tau_max && f.a_min > 0.0 && f.a_min < 1.0) {
                return bad("foliation needs 0 <= tau_min < tau_max, tau_step > 0 and 0 < a_min < 1");
            }
        }
        if self.morawetz.windows.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return bad("morawetz windows must be positive");
        }
        self.check_reach()
    }

    /// Compactly supported data must not reach the frozen end nodes before
    /// `t_final` (plus the backward pass a decay study needs).
    fn check_reach(&self) -> Result<()> {
        let g = &self.grid;
        let back = if self.study == StudyKind::Decay { 2.0 * self.mass * (g.r_star_max.abs() + 3.0).ln() + 5.0 } else { 0.0 };
        let h_max = self.spacings().into_iter().fold(g.h, f64::max);
        let margin = END_MARGIN * h_max;
        for m in &self.modes {
            for p in m.profiles() {
                if p.is_zero() {
                    continue;
                }
                let Some((lo, hi)) = p.support() else { continue };
                let reach = self.time.t_final.max(back);
                if lo - reach < g.r_star_min + margin || hi + reach > g.r_star_max - margin {
                    return Err(LabError::Config(format!(
                        "mode {}: data on [{lo}, {hi}] reaches the grid ends [{}, {}] before t = {reach}; widen the grid",
                        m.tag(),
                        g.r_star_min,
                        g.r_star_max
                    )));
                }
            }
        }
        Ok(())
    }
}
