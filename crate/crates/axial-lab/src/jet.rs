//! Second-order forward-mode jets: a value with its first two derivatives.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d: f64,
    pub dd: f64,
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        Self { v, d: 0.0, dd: 0.0 }
    }

    pub fn variable(v: f64) -> Self {
        Self { v, d: 1.0, dd: 0.0 }
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        Self { v: e, d: e * self.d, dd: e * (self.dd + self.d * self.d) }
    }

    pub fn ln(self) -> Self {
        Self { v: self.v.ln(), d: self.d / self.v, dd: self.dd / self.v - self.d * self.d / (self.v * self.v) }
    }

    pub fn recip(self) -> Self {
        let iv = 1.0 / self.v;
        Self { v: iv, d: -self.d * iv * iv, dd: -self.dd * iv * iv + 2.0 * self.d * self.d * iv * iv * iv }
    }

    pub fn scale(self, c: f64) -> Self {
        Self { v: c * self.v, d: c * self.d, dd: c * self.dd }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet { v: self.v + o.v, d: self.d + o.d, dd: self.dd + o.dd }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet { v: self.v - o.v, d: self.d - o.d, dd: self.dd - o.dd }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet {
            v: self.v * o.v,
            d: self.d * o.v + self.v * o.d,
            dd: self.dd * o.v + 2.0 * self.d * o.d + self.v * o.dd,
        }
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, c: f64) -> Jet {
        Jet { v: self.v + c, ..self }
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, c: f64) -> Jet {
        self.scale(c)
    }
}

/// Smooth step: 0 for `z ≤ 0`, 1 for `z ≥ 1`, C^∞ in between.
pub fn smooth_step(z: Jet) -> Jet {
    if z.v <= 0.0 {
        return Jet::constant(0.0);
    }
    if z.v >= 1.0 {
        return Jet::constant(1.0);
    }
    let phi = |w: Jet| (-w.recip()).exp();
    let a = phi(z);
    let b = phi(-z + 1.0);
    a / (a + b)
}
