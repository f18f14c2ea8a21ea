//! Exact polynomials in `(M, r, L, t, ℓ)` over the rationals, and rational
//! functions whose denominators are `r^a (r − 2M)^b`.
//!
//! `L` stands for `log((r − 2M)/M)`: it is an independent symbol whose
//! `r` derivative is `1/(r − 2M)`. Every closed form checked in this crate
//! has a denominator of that shape, so no polynomial gcd is ever needed.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

const NV: usize = 5;

/// Polynomial variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    M = 0,
    R = 1,
    L = 2,
    T = 3,
    Ell = 4,
}

const NAMES: [&str; NV] = ["M", "r", "L", "t", "l"];

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<[u32; NV], Q>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Q) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert([0; NV], c);
        }
        p
    }

    pub fn int(n: i64) -> Self {
        Self::constant(q(n))
    }

    pub fn var(v: Var) -> Self {
        let mut e = [0; NV];
        e[v as usize] = 1;
        let mut p = Self::zero();
        p.terms.insert(e, Q::one());
        p
    }

    pub fn m() -> Self {
        Self::var(Var::M)
    }

    pub fn r() -> Self {
        Self::var(Var::R)
    }

    /// `r − 2M`.
    pub fn x() -> Self {
        Self::r() - Self::m() * 2
    }

    /// `Σ c_k M^{n−k} r^k` for coefficients listed in increasing powers of `r`.
    pub fn homogeneous(coeffs: &[i64]) -> Self {
        let n = coeffs.len() as u32 - 1;
        let mut p = Self::zero();
        for (k, &c) in coeffs.iter().enumerate() {
            let mut e = [0; NV];
            e[Var::M as usize] = n - k as u32;
            e[Var::R as usize] = k as u32;
            p.add_term(e, q(c));
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, e: [u32; NV], c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect() }
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::int(1), |acc, _| &acc * self)
    }

    pub fn degree(&self, v: Var) -> u32 {
        self.terms.keys().map(|e| e[v as usize]).max().unwrap_or(0)
    }

    /// Partial derivative.
    pub fn partial(&self, v: Var) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let k = e[v as usize];
            if k > 0 {
                let mut e2 = *e;
                e2[v as usize] -= 1;
                out.add_term(e2, c * q(k as i64));
            }
        }
        out
    }

    /// Coefficients of `r^k`, `k = 0..=deg`, as polynomials in the other variables.
    pub fn coefficients_in_r(&self) -> Vec<Poly> {
        let d = self.degree(Var::R) as usize;
        let mut out = vec![Self::zero(); d + 1];
        for (e, c) in &self.terms {
            let mut e2 = *e;
            let k = e2[Var::R as usize] as usize;
            e2[Var::R as usize] = 0;
            out[k].add_term(e2, c.clone());
        }
        out
    }

    fn from_r_coefficients(cs: &[Poly]) -> Self {
        let mut out = Self::zero();
        for (k, c) in cs.iter().enumerate() {
            for (e, v) in &c.terms {
                let mut e2 = *e;
                e2[Var::R as usize] += k as u32;
                out.add_term(e2, v.clone());
            }
        }
        out
    }

    /// Exact quotient by `r`, if every term contains `r`.
    pub fn div_r(&self) -> Option<Self> {
        if self.terms.keys().any(|e| e[Var::R as usize] == 0) {
            return None;
        }
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let mut e2 = *e;
            e2[Var::R as usize] -= 1;
            out.add_term(e2, c.clone());
        }
        Some(out)
    }

    /// Exact quotient by `r − 2M` (synthetic division in `r`).
    pub fn div_x(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        let c = self.coefficients_in_r();
        let n = c.len() - 1;
        if n == 0 {
            return None;
        }
        let two_m = Self::m() * 2;
        let mut qs = vec![Self::zero(); n];
        qs[n - 1] = c[n].clone();
        for k in (1..n).rev() {
            qs[k - 1] = &c[k] + &(&two_m * &qs[k]);
        }
        let rem = &c[0] + &(&two_m * &qs[0]);
        if rem.is_zero() {
            Some(Self::from_r_coefficients(&qs))
        } else {
            None
        }
    }

    /// Substitutes rational values for the given variables.
    pub fn substitute(&self, vals: &[(Var, Q)]) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let mut e2 = *e;
            let mut coef = c.clone();
            for (v, x) in vals {
                let k = e2[*v as usize];
                e2[*v as usize] = 0;
                coef *= num_traits::pow(x.clone(), k as usize);
            }
            out.add_term(e2, coef);
        }
        out
    }

    /// The constant value, if the polynomial has no variables left.
    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&[0; NV]).cloned(),
            _ => None,
        }
    }

    /// Coefficients of a polynomial in `r` alone.
    pub fn univariate_r(&self) -> Option<Vec<Q>> {
        self.coefficients_in_r().iter().map(|c| c.as_constant()).collect()
    }

    /// Coefficients `c_k` of `M^{n−k} r^k` for a form homogeneous of degree `n`
    /// in `(M, r)`.
    pub fn homogeneous_coefficients(&self, n: u32) -> Option<Vec<Q>> {
        let mut out = vec![Q::zero(); n as usize + 1];
        for (e, c) in &self.terms {
            let (m, r) = (e[Var::M as usize], e[Var::R as usize]);
            if m + r != n || e.iter().enumerate().any(|(i, k)| i > 1 && *k > 0) {
                return None;
            }
            out[r as usize] = c.clone();
        }
        Some(out)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (i, k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*{}", NAMES[i])?,
                    _ => write!(f, "*{}^{k}", NAMES[i])?,
                }
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let mut e = *e1;
                for i in 0..NV {
                    e[i] += e2[i];
                }
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&q(-1))
    }
}

macro_rules! mixed_op {
    ($t:ty, $tr:ident, $f:ident) => {
        impl $tr<&$t> for $t {
            type Output = $t;
            fn $f(self, o: &$t) -> $t {
                (&self).$f(o)
            }
        }
        impl $tr<$t> for &$t {
            type Output = $t;
            fn $f(self, o: $t) -> $t {
                self.$f(&o)
            }
        }
    };
}

macro_rules! owned_ops {
    ($t:ty) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t {
                &self + &o
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t {
                &self - &o
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, o: $t) -> $t {
                &self * &o
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                -&self
            }
        }
        impl Mul<i64> for $t {
            type Output = $t;
            fn mul(self, c: i64) -> $t {
                self.scale(&q(c))
            }
        }
        impl Mul<i64> for &$t {
            type Output = $t;
            fn mul(self, c: i64) -> $t {
                self.scale(&q(c))
            }
        }
        mixed_op!($t, Add, add);
        mixed_op!($t, Sub, sub);
        mixed_op!($t, Mul, mul);
    };
}

owned_ops!(Poly);

/// `num / (r^a (r − 2M)^b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFn {
    pub num: Poly,
    pub r_pow: u32,
    pub x_pow: u32,
}

impl RatFn {
    pub fn new(num: Poly, r_pow: u32, x_pow: u32) -> Self {
        Self { num, r_pow, x_pow }.reduced()
    }

    pub fn poly(p: Poly) -> Self {
        Self::new(p, 0, 0)
    }

    pub fn int(n: i64) -> Self {
        Self::poly(Poly::int(n))
    }

    pub fn constant(c: Q) -> Self {
        Self::poly(Poly::constant(c))
    }

    pub fn m() -> Self {
        Self::poly(Poly::m())
    }

    pub fn r() -> Self {
        Self::poly(Poly::r())
    }

    pub fn inv_r(k: u32) -> Self {
        Self::new(Poly::int(1), k, 0)
    }

    /// `A = 1 − 2M/r = (r − 2M)/r`.
    pub fn a() -> Self {
        Self::new(Poly::x(), 1, 0)
    }

    /// `1/A = r/(r − 2M)`.
    pub fn inv_a() -> Self {
        Self::new(Poly::r(), 0, 1)
    }

    /// `μ = 2M/r`.
    pub fn mu() -> Self {
        Self::new(Poly::m() * 2, 1, 0)
    }

    /// `L = log((r − 2M)/M)`.
    pub fn log() -> Self {
        Self::poly(Poly::var(Var::L))
    }

    pub fn var(v: Var) -> Self {
        Self::poly(Poly::var(v))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn reduced(mut self) -> Self {
        if self.num.is_zero() {
            self.r_pow = 0;
            self.x_pow = 0;
            return self;
        }
        while self.r_pow > 0 {
            match self.num.div_r() {
                Some(p) => {
                    self.num = p;
                    self.r_pow -= 1;
                }
                None => break,
            }
        }
        while self.x_pow > 0 {
            match self.num.div_x() {
                Some(p) => {
                    self.num = p;
                    self.x_pow -= 1;
                }
                None => break,
            }
        }
        self
    }

    fn lifted(&self, a: u32, b: u32) -> Poly {
        let mut p = self.num.clone();
        let extra_r = Poly::r().pow(a - self.r_pow);
        let extra_x = Poly::x().pow(b - self.x_pow);
        p = &(&p * &extra_r) * &extra_x;
        p
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self::new(self.num.scale(c), self.r_pow, self.x_pow)
    }

    pub fn pow(&self, n: u32) -> Self {
        Self::new(self.num.pow(n), self.r_pow * n, self.x_pow * n)
    }

    /// `d/dr`, with `dL/dr = 1/(r − 2M)`.
    pub fn d_dr(&self) -> Self {
        let (a, b) = (self.r_pow, self.x_pow);
        let n = &self.num;
        let r = Poly::r();
        let x = Poly::x();
        let num = &(&(&(&n.partial(Var::R) * &r) * &x) + &(&n.partial(Var::L) * &r))
            - &(&(n * &x).scale(&q(a as i64)) + &(n * &r).scale(&q(b as i64)));
        Self::new(num, a + 1, b + 1)
    }

    /// `d/dr* = A d/dr`.
    pub fn d_drs(&self) -> Self {
        &Self::a() * &self.d_dr()
    }

    /// `∂/∂t`.
    pub fn d_dt(&self) -> Self {
        Self::new(self.num.partial(Var::T), self.r_pow, self.x_pow)
    }

    /// The polynomial `self · r^a (r − 2M)^b`, if that clears the denominator.
    pub fn times_denominator(&self, r_pow: u32, x_pow: u32) -> Option<Poly> {
        if self.r_pow > r_pow || self.x_pow > x_pow {
            return None;
        }
        let p = &self.num * &Poly::r().pow(r_pow - self.r_pow);
        Some(&p * &Poly::x().pow(x_pow - self.x_pow))
    }

    pub fn substitute(&self, vals: &[(Var, Q)]) -> Self {
        Self { num: self.num.substitute(vals), r_pow: self.r_pow, x_pow: self.x_pow }
    }

    /// Exact value at rational `M`, `r` (and any other variables given).
    pub fn eval(&self, vals: &[(Var, Q)]) -> Option<Q> {
        let num = self.num.substitute(vals).as_constant()?;
        let get = |v: Var| vals.iter().find(|(w, _)| *w == v).map(|(_, x)| x.clone());
        let (m, r) = (get(Var::M)?, get(Var::R)?);
        let x = &r - &(&m * q(2));
        let den = num_traits::pow(r, self.r_pow as usize) * num_traits::pow(x, self.x_pow as usize);
        if den.is_zero() {
            return None;
        }
        Some(num / den)
    }
}

impl Add for &RatFn {
    type Output = RatFn;
    fn add(self, o: &RatFn) -> RatFn {
        let (a, b) = (self.r_pow.max(o.r_pow), self.x_pow.max(o.x_pow));
        RatFn::new(&self.lifted(a, b) + &o.lifted(a, b), a, b)
    }
}

impl Sub for &RatFn {
    type Output = RatFn;
    fn sub(self, o: &RatFn) -> RatFn {
        let (a, b) = (self.r_pow.max(o.r_pow), self.x_pow.max(o.x_pow));
        RatFn::new(&self.lifted(a, b) - &o.lifted(a, b), a, b)
    }
}

impl Mul for &RatFn {
    type Output = RatFn;
    fn mul(self, o: &RatFn) -> RatFn {
        RatFn::new(&self.num * &o.num, self.r_pow + o.r_pow, self.x_pow + o.x_pow)
    }
}

impl Neg for &RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        RatFn { num: -&self.num, r_pow: self.r_pow, x_pow: self.x_pow }
    }
}

owned_ops!(RatFn);

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.r_pow, self.x_pow) {
            _ if self.num.is_zero() => write!(f, "0"),
            (0, 0) => write!(f, "{}", self.num),
            (a, 0) => write!(f, "[{}] / r^{a}", self.num),
            (0, b) => write!(f, "[{}] / (r-2M)^{b}", self.num),
            (a, b) => write!(f, "[{}] / (r^{a} (r-2M)^{b})", self.num),
        }
    }
}

/// Sturm-sequence root counting for univariate rational polynomials,
/// coefficients in increasing degree.
pub mod sturm {
    use super::*;

    fn trim(p: &mut Vec<Q>) {
        while p.last().is_some_and(|c| c.is_zero()) {
            p.pop();
        }
    }

    fn derivative(p: &[Q]) -> Vec<Q> {
        p.iter().enumerate().skip(1).map(|(k, c)| c * q(k as i64)).collect()
    }

    fn rem(a: &[Q], b: &[Q]) -> Vec<Q> {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let lead = b[db].clone();
        while r.len() > db && !r.is_empty() {
            let shift = r.len() - 1 - db;
            let f = r[r.len() - 1].clone() / lead.clone();
            for (k, c) in b.iter().enumerate() {
                r[k + shift] -= &f * c;
            }
            r.pop();
            trim(&mut r);
        }
        r
    }

    pub fn eval(p: &[Q], x: &Q) -> Q {
        p.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
    }

    pub fn sequence(p: &[Q]) -> Vec<Vec<Q>> {
        let mut p0 = p.to_vec();
        trim(&mut p0);
        let mut seq = vec![p0.clone()];
        let mut p1 = derivative(&p0);
        trim(&mut p1);
        while !p1.is_empty() {
            let r = rem(&seq[seq.len() - 1], &p1);
            seq.push(p1);
            p1 = r.into_iter().map(|c| -c).collect();
            trim(&mut p1);
        }
        seq
    }

    fn changes(signs: impl Iterator<Item = i32>) -> usize {
        let s: Vec<i32> = signs.filter(|s| *s != 0).collect();
        s.windows(2).filter(|w| w[0] != w[1]).count()
    }

    fn sign(x: &Q) -> i32 {
        if x.is_positive() {
            1
        } else if x.is_negative() {
            -1
        } else {
            0
        }
    }

    /// Number of distinct real roots in `(a, ∞)`.
    pub fn roots_above(p: &[Q], a: &Q) -> usize {
        let seq = sequence(p);
        let at_a = changes(seq.iter().map(|s| sign(&eval(s, a))));
        let at_inf = changes(seq.iter().map(|s| s.last().map_or(0, sign)));
        at_a - at_inf
    }

    /// Floating value, for reporting.
    pub fn to_f64(x: &Q) -> f64 {
        x.to_f64().unwrap_or(f64::NAN)
    }
}
