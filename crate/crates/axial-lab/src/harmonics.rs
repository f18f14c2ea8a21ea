//! Axisymmetric spin-weighted harmonics on the unit sphere.
//!
//! A spin-`s` section is stored as its real coefficient relative to `Ψ₋₁^s`,
//! sampled at Gauss–Legendre nodes in `x = cos θ`. For integer spin such a
//! coefficient is `(1 − x²)^s q(x)` with `q` smooth, so band-limited sections
//! are polynomials in `x` and every operator below is exact up to rounding.

use crate::error::{LabError, Result};
use crate::quad::{legendre_table, GaussLegendre};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// `(s, ℓ)` with `m = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
pub struct ModeIndex {
    pub s: u32,
    pub l: u32,
}

impl ModeIndex {
    pub fn new(s: u32, l: u32) -> Result<Self> {
        if !(1..=2).contains(&s) {
            return Err(LabError::Mode { s, l, reason: "spin must be 1 or 2" });
        }
        if l < s {
            return Err(LabError::Mode { s, l, reason: "l must be at least s" });
        }
        Ok(Self { s, l })
    }

    /// `Λ = ℓ(ℓ+1) − s²`, the angular Dirichlet quotient on this mode.
    pub fn lambda(&self) -> f64 {
        (self.l * (self.l + 1)) as f64 - (self.s * self.s) as f64
    }

    /// Eigenvalue `s² − ℓ(ℓ+1)` of the bundle Laplacian.
    pub fn eigenvalue(&self) -> f64 {
        -self.lambda()
    }
}

/// `√((ℓ − s)(ℓ + s + 1))`: `ð Y_{sℓ0} = raise · Y_{s+1,ℓ0}`.
pub fn raise_constant(s: u32, l: u32) -> f64 {
    if l < s {
        return 0.0;
    }
    (((l - s) * (l + s + 1)) as f64).sqrt()
}

/// `ð̄ Y_{s+1,ℓ0} = lower · Y_{sℓ0}`; adjointness forces `lower = −raise`.
pub fn lower_constant(s_target: u32, l: u32) -> f64 {
    -raise_constant(s_target, l)
}

/// Smallest `Λ` over `ℓ ≥ l_min` for spin `s`.
pub fn poincare_constant(s: u32, l_min: u32) -> u32 {
    (l_min.max(s)..l_min.max(s) + 16)
        .map(|l| l * (l + 1) - s * s)
        .min()
        .unwrap_or(0)
}

/// Gauss–Legendre nodes in `cos θ`; no node sits on a pole.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    gl: GaussLegendre,
    tables: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)>,
}

impl SphereGrid {
    pub fn new(n: usize) -> Self {
        let gl = GaussLegendre::new(n);
        let tables = gl.nodes.iter().map(|&x| legendre_table(n, x)).collect();
        Self { gl, tables }
    }

    /// A grid of order `4ℓ_max + 8`.
    pub fn for_lmax(l_max: u32) -> Self {
        Self::new(4 * l_max as usize + 8)
    }

    pub fn len(&self) -> usize {
        self.gl.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gl.is_empty()
    }

    pub fn cos_theta(&self) -> &[f64] {
        &self.gl.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.gl.weights
    }

    /// Legendre coefficients of the polynomial interpolating `f` at the nodes.
    pub fn legendre_coefficients(&self, f: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut c = vec![0.0; n];
        for (i, fi) in f.iter().enumerate() {
            let wf = self.gl.weights[i] * fi;
            for (k, ck) in c.iter_mut().enumerate() {
                *ck += wf * self.tables[i].0[k];
            }
        }
        for (k, ck) in c.iter_mut().enumerate() {
            *ck *= (2 * k + 1) as f64 / 2.0;
        }
        c
    }

    /// First and second `x`-derivatives of the interpolant of `f`.
    pub fn derivatives(&self, f: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let c = self.legendre_coefficients(f);
        let d1 = self.tables.iter().map(|t| c.iter().zip(&t.1).map(|(a, b)| a * b).sum()).collect();
        let d2 = self.tables.iter().map(|t| c.iter().zip(&t.2).map(|(a, b)| a * b).sum()).collect();
        (d1, d2)
    }

    /// Fails unless `f / (1 − x²)^s` is band-limited, i.e. `f` vanishes like
    /// `sin^{2s} θ` at both poles.
    pub fn check_regular(&self, f: &[f64], s: u32) -> Result<()> {
        if f.iter().any(|v| !v.is_finite()) {
            return Err(LabError::Regularity { s, tail: f64::INFINITY });
        }
        if s == 0 {
            return Ok(());
        }
        let c = self.legendre_coefficients(&self.reduce(f, s));
        let norm = |cs: &[f64], k0: usize| -> f64 {
            cs.iter().enumerate().map(|(k, v)| v * v * 2.0 / (2 * (k + k0) + 1) as f64).sum::<f64>()
        };
        let total = norm(&c, 0);
        if total == 0.0 {
            return Ok(());
        }
        let half = c.len() / 2;
        let tail = (norm(&c[half..], half) / total).sqrt();
        if tail.is_finite() && tail <= 1e-7 {
            Ok(())
        } else {
            Err(LabError::Regularity { s, tail })
        }
    }

    /// `⟨f, g⟩ = 2π ∫ f ḡ sin^{1−2s} θ dθ`.
    pub fn inner_product(&self, f: &[Complex64], g: &[Complex64], s: u32) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, x) in self.cos_theta().iter().enumerate() {
            let wt = self.gl.weights[i] / (1.0 - x * x).powi(s as i32);
            acc += f[i] * g[i].conj() * wt;
        }
        if !acc.re.is_finite() || !acc.im.is_finite() {
            return Err(LabError::Regularity { s, tail: f64::INFINITY });
        }
        Ok(acc * 2.0 * PI)
    }

    /// Real specialization of [`Self::inner_product`].
    pub fn dot(&self, f: &[f64], g: &[f64], s: u32) -> f64 {
        self.cos_theta()
            .iter()
            .enumerate()
            .map(|(i, x)| self.gl.weights[i] * f[i] * g[i] / (1.0 - x * x).powi(s as i32))
            .sum::<f64>()
            * 2.0
            * PI
    }

    pub fn norm(&self, f: &[f64], s: u32) -> f64 {
        self.dot(f, f, s).sqrt()
    }

    /// `q = f / (1 − x²)^s`. The operators below act on `q`, whose
    /// interpolant has low degree, so high Legendre coefficients carrying
    /// only rounding are not amplified by differentiation near the poles.
    fn reduce(&self, f: &[f64], s: u32) -> Vec<f64> {
        f.iter().zip(self.cos_theta()).map(|(v, x)| v / (1.0 - x * x).powi(s as i32)).collect()
    }

    /// `ð_s f = sin^{2s+1}θ (sin^{−2s}θ f)_θ = −[(1 − x²) f_x + 2s x f]`,
    /// evaluated as `−(1 − x²)^{s+1} q_x`.
    pub fn eth_raise(&self, s: u32, f: &[f64]) -> Result<Vec<f64>> {
        self.check_regular(f, s)?;
        let (dq, _) = self.derivatives(&self.reduce(f, s));
        Ok(self
            .cos_theta()
            .iter()
            .zip(dq)
            .map(|(x, d)| -(1.0 - x * x).powi(s as i32 + 1) * d)
            .collect())
    }

    /// `ð̄_s f = sin^{−1}θ f_θ = −f_x`, landing in spin `s − 1`, evaluated as
    /// `−(1 − x²)^{s−1} [(1 − x²) q_x − 2s x q]`.
    pub fn eth_lower(&self, s: u32, f: &[f64]) -> Result<Vec<f64>> {
        if s == 0 {
            return Err(LabError::Mode { s, l: 0, reason: "cannot lower spin 0" });
        }
        self.check_regular(f, s)?;
        let q = self.reduce(f, s);
        let (dq, _) = self.derivatives(&q);
        Ok(self
            .cos_theta()
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let w = 1.0 - x * x;
                -w.powi(s as i32 - 1) * (w * dq[i] - 2.0 * s as f64 * x * q[i])
            })
            .collect())
    }

    /// `f_θθ − (2s − 1) cot θ f_θ + s f`, i.e. `(1 − x²) f_xx + (2s − 2) x f_x + s f`,
    /// evaluated as `(1 − x²)^s [(1 − x²) q_xx − 2(s + 1) x q_x − s q]`.
    pub fn angular_laplacian(&self, s: u32, f: &[f64]) -> Vec<f64> {
        let q = self.reduce(f, s);
        let (d1, d2) = self.derivatives(&q);
        let sf = s as f64;
        self.cos_theta()
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let w = 1.0 - x * x;
                w.powi(s as i32) * (w * d2[i] - 2.0 * (sf + 1.0) * x * d1[i] - sf * q[i])
            })
            .collect()
    }

    /// `Y_{sℓ0}` built by raising `P_ℓ(cos θ)` `s` times and normalizing at
    /// each stage, which makes every raise constant positive.
    pub fn harmonic(&self, s: u32, l: u32) -> Result<Vec<f64>> {
        if l < s {
            return Err(LabError::Mode { s, l, reason: "the s-fold raise of P_l vanishes for s > l" });
        }
        let n = self.len();
        if (l + s) as usize >= n {
            return Err(LabError::Mode { s, l, reason: "sphere grid too coarse for this mode" });
        }
        let mut y: Vec<f64> = self.tables.iter().map(|t| t.0[l as usize]).collect();
        let nrm = self.norm(&y, 0);
        y.iter_mut().for_each(|v| *v /= nrm);
        for k in 0..s {
            y = self.eth_raise(k, &y)?;
            let nrm = self.norm(&y, k + 1);
            y.iter_mut().for_each(|v| *v /= nrm);
        }
        Ok(y)
    }

    pub fn eval_harmonic(&self, mode: ModeIndex) -> Result<HarmonicTable> {
        let values = self.harmonic(mode.s, mode.l)?;
        let norm = self.norm(&values, mode.s);
        Ok(HarmonicTable { mode, cos_theta: self.cos_theta().to_vec(), values, norm })
    }

    /// Coefficients `⟨f, Y_{sℓ0}⟩` for `ℓ = s, …, l_max`.
    pub fn project_modes(&self, f: &[f64], s: u32, l_max: u32) -> Result<Vec<f64>> {
        self.check_regular(f, s)?;
        (s..=l_max).map(|l| Ok(self.dot(f, &self.harmonic(s, l)?, s))).collect()
    }

    /// Inverse of [`Self::project_modes`].
    pub fn reconstruct(&self, coefficients: &[f64], s: u32) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.len()];
        for (k, c) in coefficients.iter().enumerate() {
            let y = self.harmonic(s, s + k as u32)?;
            out.iter_mut().zip(&y).for_each(|(o, v)| *o += c * v);
        }
        Ok(out)
    }
}

/// Samples of one harmonic on a [`SphereGrid`].
#[derive(Debug, Clone, Serialize)]
pub struct HarmonicTable {
    pub mode: ModeIndex,
    pub cos_theta: Vec<f64>,
    pub values: Vec<f64>,
    pub norm: f64,
}

impl HarmonicTable {
    /// CSV with columns `cos_theta, coefficient`.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["cos_theta", "coefficient"])?;
        for (x, v) in self.cos_theta.iter().zip(&self.values) {
            out.write_record([format!("{x:.17e}"), format!("{v:.17e}")])?;
        }
        out.flush()?;
        Ok(())
    }
}
