use super::{check_cfl, d1, d2, Observer, RadialTable, Scheme};
use crate::error::{LabError, Result};
use num_complex::Complex64;

type C = Complex64;
const ZERO: C = C::new(0.0, 0.0);

/// One evolved wave `u_tt = u_{r*r*} − V_eff u` with `v = u_t`.
#[derive(Debug, Clone)]
pub struct Wave {
    pub u: Vec<C>,
    pub v: Vec<C>,
    pub veff: Vec<f64>,
    u0: Vec<C>,
    v0: Vec<C>,
    prev_u: Vec<C>,
    prev_v: Vec<C>,
    acc: Vec<C>,
}

impl Wave {
    pub fn new(u: Vec<C>, v: Vec<C>, veff: Vec<f64>) -> Self {
        Self {
            u0: u.clone(),
            v0: v.clone(),
            prev_u: u.clone(),
            prev_v: v.clone(),
            acc: vec![ZERO; u.len()],
            u,
            v,
            veff,
        }
    }

    pub fn prev_u(&self) -> &[C] {
        &self.prev_u
    }

    pub fn prev_v(&self) -> &[C] {
        &self.prev_v
    }
}

/// `γ` integrated along an α wave through `γ_t = α_{r*} + (2Δ/r³) α`, which
/// in terms of `u = r α` reads `γ_t = (u_{r*} + A u / r)/r`.
#[derive(Debug, Clone)]
pub struct GammaLink {
    pub alpha: usize,
    pub g: Vec<C>,
    prev_g: Vec<C>,
    rate: Vec<C>,
}

impl GammaLink {
    pub fn new(alpha: usize, g: Vec<C>) -> Self {
        Self { alpha, prev_g: g.clone(), rate: vec![ZERO; g.len()], g }
    }

    pub fn prev_g(&self) -> &[C] {
        &self.prev_g
    }
}

/// Lock-step time integrator for a set of waves sharing one grid.
///
/// The outermost stencil nodes are frozen at their initial values. Any
/// change near the ends larger than a tiny fraction of the data scale is
/// reported as boundary contact rather than reflected.
pub struct Evolver<'a> {
    pub table: &'a RadialTable,
    pub scheme: Scheme,
    pub waves: Vec<Wave>,
    pub gamma: Option<GammaLink>,
    pub t: f64,
    pub prev_t: f64,
    pub steps: usize,
    scale: f64,
    guard: usize,
    inv_r: Vec<f64>,
    a_over_r: Vec<f64>,
}

/// Relative size of a disturbance in the guard band that counts as contact.
pub const CONTACT_TOLERANCE: f64 = 1e-10;

impl<'a> Evolver<'a> {
    pub fn new(table: &'a RadialTable, scheme: Scheme, waves: Vec<Wave>, gamma: Option<GammaLink>, t0: f64) -> Result<Self> {
        let n = table.grid.n;
        for w in &waves {
            if w.u.len() != n || w.v.len() != n || w.veff.len() != n {
                return Err(LabError::Construction("wave length does not match grid".into()));
            }
        }
        if let Some(g) = &gamma {
            if g.alpha >= waves.len() || g.g.len() != n {
                return Err(LabError::Construction("gamma link does not match the waves".into()));
            }
        }
        let scale = waves
            .iter()
            .map(|w| w.u.iter().chain(&w.v).map(|z| z.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        let mut ev = Self {
            table,
            scheme,
            waves,
            gamma,
            t: t0,
            prev_t: t0,
            steps: 0,
            scale,
            guard: 4 * scheme.half_width() + 8,
            inv_r: table.points.iter().map(|p| 1.0 / p.r).collect(),
            a_over_r: table.points.iter().map(|p| p.a / p.r).collect(),
        };
        for k in 0..ev.waves.len() {
            ev.accel(k);
        }
        ev.gamma_rate();
        Ok(ev)
    }

    fn interior(&self) -> std::ops::Range<usize> {
        let k = self.scheme.half_width();
        k..self.table.grid.n - k
    }

    /// `u_{r*r*} − V_eff u` at an interior node of the given array.
    pub fn laplacian_at(&self, k: usize, u: &[C], j: usize) -> C {
        d2(u, j, self.table.grid.h, self.scheme.order()) - u[j] * self.waves[k].veff[j]
    }

    fn accel(&mut self, k: usize) {
        let h = self.table.grid.h;
        let order = self.scheme.order();
        let range = self.interior();
        let w = &mut self.waves[k];
        for j in range {
            w.acc[j] = d2(&w.u, j, h, order) - w.u[j] * w.veff[j];
        }
    }

    fn gamma_rate(&mut self) {
        let h = self.table.grid.h;
        let order = self.scheme.order();
        let range = self.interior();
        if let Some(g) = &mut self.gamma {
            let u = &self.waves[g.alpha].u;
            for j in range {
                g.rate[j] = (d1(u, j, h, order) + u[j] * self.a_over_r[j]) * self.inv_r[j];
            }
        }
    }

    fn save_prev(&mut self) {
        self.prev_t = self.t;
        for w in &mut self.waves {
            w.prev_u.copy_from_slice(&w.u);
            w.prev_v.copy_from_slice(&w.v);
        }
        if let Some(g) = &mut self.gamma {
            g.prev_g.copy_from_slice(&g.g);
        }
    }

    /// Advances by `dt` (which may be negative).
    pub fn step(&mut self, dt: f64) -> Result<()> {
        self.save_prev();
        match self.scheme {
            Scheme::Second => self.step_verlet(dt),
            Scheme::Fourth => self.step_rk4(dt),
        }
        self.t = self.prev_t + dt;
        self.steps += 1;
        self.check_contact()
    }

    fn step_verlet(&mut self, dt: f64) {
        let range = self.interior();
        let gamma_before: Option<Vec<C>> = self.gamma.as_ref().map(|g| g.rate.clone());
        for k in 0..self.waves.len() {
            {
                let w = &mut self.waves[k];
                for j in range.clone() {
                    w.v[j] += w.acc[j] * (0.5 * dt);
                    w.u[j] += w.v[j] * dt;
                }
            }
            self.accel(k);
            let w = &mut self.waves[k];
            for j in range.clone() {
                w.v[j] += w.acc[j] * (0.5 * dt);
            }
        }
        self.gamma_rate();
        if let (Some(g), Some(before)) = (&mut self.gamma, gamma_before) {
            for j in range {
                g.g[j] += (before[j] + g.rate[j]) * (0.5 * dt);
            }
        }
    }

    fn step_rk4(&mut self, dt: f64) {
        let n = self.table.grid.n;
        let range = self.interior();
        let nw = self.waves.len();
        let h = self.table.grid.h;
        let u0: Vec<Vec<C>> = self.waves.iter().map(|w| w.u.clone()).collect();
        let v0: Vec<Vec<C>> = self.waves.iter().map(|w| w.v.clone()).collect();
        let mut ku = vec![vec![ZERO; n]; nw];
        let mut kv = vec![vec![ZERO; n]; nw];
        let mut kg = vec![ZERO; n];
        let mut su: Vec<Vec<C>> = u0.clone();
        let mut sv: Vec<Vec<C>> = v0.clone();
        let weights = [1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0];
        let nodes = [0.0, 0.5, 0.5, 1.0];
        for stage in 0..4 {
            if stage > 0 {
                let c = nodes[stage] * dt;
                for k in 0..nw {
                    for j in range.clone() {
                        su[k][j] = u0[k][j] + ku[k][j] * c;
                        sv[k][j] = v0[k][j] + kv[k][j] * c;
                    }
                }
            }
            for k in 0..nw {
                let veff = &self.waves[k].veff;
                for j in range.clone() {
                    ku[k][j] = sv[k][j];
                    kv[k][j] = d2(&su[k], j, h, 4) - su[k][j] * veff[j];
                }
            }
            if let Some(g) = &self.gamma {
                let u = &su[g.alpha];
                for j in range.clone() {
                    kg[j] = (d1(u, j, h, 4) + u[j] * self.a_over_r[j]) * self.inv_r[j];
                }
            }
            let w = weights[stage] * dt;
            for k in 0..nw {
                let wave = &mut self.waves[k];
                for j in range.clone() {
                    wave.u[j] += ku[k][j] * w;
                    wave.v[j] += kv[k][j] * w;
                }
            }
            if let Some(g) = &mut self.gamma {
                for j in range.clone() {
                    g.g[j] += kg[j] * w;
                }
            }
        }
        for k in 0..nw {
            self.accel(k);
        }
        self.gamma_rate();
    }

    fn check_contact(&self) -> Result<()> {
        if self.scale == 0.0 {
            return Ok(());
        }
        let n = self.table.grid.n;
        let tol = CONTACT_TOLERANCE * self.scale;
        for w in &self.waves {
            let dev = |j: usize| (w.u[j] - w.u0[j]).norm() + (w.v[j] - w.v0[j]).norm();
            if (0..self.guard).any(|j| dev(j) > tol) {
                return Err(LabError::BoundaryContact { t: self.t, side: "inner" });
            }
            if (n - self.guard..n).any(|j| dev(j) > tol) {
                return Err(LabError::BoundaryContact { t: self.t, side: "outer" });
            }
        }
        Ok(())
    }

    /// Steps until `t_end`, adjusting the step so the run lands on `t_end`
    /// exactly, and calls every observer after each step.
    pub fn run(&mut self, t_end: f64, dt: f64, observers: &mut [&mut dyn Observer]) -> Result<()> {
        check_cfl(dt, self.table.grid.h)?;
        for o in observers.iter_mut() {
            o.start(self)?;
        }
        let span = t_end - self.t;
        if span == 0.0 {
            return Ok(());
        }
        let steps = (span.abs() / dt.abs()).round().max(1.0) as usize;
        let step = span / steps as f64;
        check_cfl(step, self.table.grid.h)?;
        let t0 = self.t;
        for i in 0..steps {
            self.step(step)?;
            self.t = t0 + (i + 1) as f64 * step;
            for o in observers.iter_mut() {
                o.observe(self)?;
            }
        }
        Ok(())
    }
}
