//! One-dimensional smooth building blocks with exact first and second
//! derivatives: the `exp(-1/t)` glue, smoothed steps, compact bumps and
//! product windows.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{domain, Result};

/// Value with first and second derivative.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub const ZERO: Jet = Jet { v: 0.0, d1: 0.0, d2: 0.0 };
    pub const ONE: Jet = Jet { v: 1.0, d1: 0.0, d2: 0.0 };

    pub fn new(v: f64, d1: f64, d2: f64) -> Self {
        Self { v, d1, d2 }
    }

    pub fn constant(v: f64) -> Self {
        Self { v, d1: 0.0, d2: 0.0 }
    }

    /// The identity map evaluated at `t`.
    pub fn var(t: f64) -> Self {
        Self { v: t, d1: 1.0, d2: 0.0 }
    }

    pub fn scale(self, c: f64) -> Self {
        Self { v: c * self.v, d1: c * self.d1, d2: c * self.d2 }
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        Self { v: e, d1: e * self.d1, d2: e * (self.d2 + self.d1 * self.d1) }
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        Self { v: s, d1: c * self.d1, d2: c * self.d2 - s * self.d1 * self.d1 }
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        Self { v: c, d1: -s * self.d1, d2: -s * self.d2 - c * self.d1 * self.d1 }
    }

    pub fn powi(self, k: i32) -> Self {
        if k == 0 {
            return Self::ONE;
        }
        let kf = f64::from(k);
        let p2 = if k >= 2 || k < 0 { self.v.powi(k - 2) } else { 0.0 };
        let p1 = self.v.powi(k - 1);
        Self {
            v: self.v.powi(k),
            d1: kf * p1 * self.d1,
            d2: kf * p1 * self.d2 + kf * (kf - 1.0) * p2 * self.d1 * self.d1,
        }
    }

    pub fn recip(self) -> Self {
        let r = 1.0 / self.v;
        Self { v: r, d1: -self.d1 * r * r, d2: (2.0 * self.d1 * self.d1 * r - self.d2) * r * r }
    }

    /// `f(g(x))` from `f` evaluated at `g(x)` and the jet of `g`.
    pub fn compose(outer: Jet, inner: Jet) -> Self {
        Self {
            v: outer.v,
            d1: outer.d1 * inner.d1,
            d2: outer.d2 * inner.d1 * inner.d1 + outer.d1 * inner.d2,
        }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet { v: self.v + o.v, d1: self.d1 + o.d1, d2: self.d2 + o.d2 }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet { v: self.v - o.v, d1: self.d1 - o.d1, d2: self.d2 - o.d2 }
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
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        }
    }
}

/// `psi(t) = exp(-1/t)` for `t > 0`, zero otherwise.
pub fn glue(t: f64) -> Jet {
    if t <= 0.0 {
        return Jet::ZERO;
    }
    let p = (-1.0 / t).exp();
    let t2 = t * t;
    Jet { v: p, d1: p / t2, d2: p * (1.0 / (t2 * t2) - 2.0 / (t2 * t)) }
}

/// Smooth step: 0 for `t <= 0`, 1 for `t >= 1`, `psi(t) / (psi(t) + psi(1 - t))` between.
pub fn smooth_step(t: f64) -> Jet {
    if t <= 0.0 {
        return Jet::ZERO;
    }
    if t >= 1.0 {
        return Jet::ONE;
    }
    let a = glue(t);
    let g = glue(1.0 - t);
    let b = Jet { v: g.v, d1: -g.d1, d2: g.d2 };
    let den = a + b;
    a * den.recip()
}

/// Step rising from 0 at `a` to 1 at `b` (`a < b`), or falling if `a > b`.
pub fn ramp(x: f64, a: f64, b: f64) -> Jet {
    let w = b - a;
    let s = smooth_step((x - a) / w);
    Jet { v: s.v, d1: s.d1 / w, d2: s.d2 / (w * w) }
}

/// Compact bump `exp(1 - 1/(1 - t^2))` on `(-1, 1)`, equal to 1 at 0.
pub fn unit_bump(t: f64) -> Jet {
    if t <= -1.0 || t >= 1.0 {
        return Jet::ZERO;
    }
    let q = Jet { v: 1.0 - t * t, d1: -2.0 * t, d2: -2.0 };
    (Jet::constant(1.0) - q.recip()).exp()
}

/// Bump centred at `center` with half-width `halfwidth`.
pub fn bump(x: f64, center: f64, halfwidth: f64) -> Jet {
    let b = unit_bump((x - center) / halfwidth);
    Jet { v: b.v, d1: b.d1 / halfwidth, d2: b.d2 / (halfwidth * halfwidth) }
}

/// Smooth 1-d window: 1 on `[inner.0, inner.1]`, 0 outside `(outer.0, outer.1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window1d {
    pub inner: (f64, f64),
    pub outer: (f64, f64),
}

impl Window1d {
    pub fn new(inner: (f64, f64), outer: (f64, f64)) -> Result<Self> {
        let ok = outer.0 < inner.0 && inner.0 <= inner.1 && inner.1 < outer.1;
        if !ok || ![inner.0, inner.1, outer.0, outer.1].iter().all(|v| v.is_finite()) {
            return domain(format!("window inner {inner:?} must lie strictly inside outer {outer:?}"));
        }
        Ok(Self { inner, outer })
    }

    pub fn eval(&self, x: f64) -> Jet {
        if x <= self.outer.0 || x >= self.outer.1 {
            return Jet::ZERO;
        }
        let rise = ramp(x, self.outer.0, self.inner.0);
        let fall = ramp(x, self.outer.1, self.inner.1);
        rise * fall
    }
}

/// Extension-axis profile: 1 on `[0, a]`, 0 on `[b, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepProfile {
    a: f64,
    b: f64,
}

impl StepProfile {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a < b && b < 1.0) {
            return domain(format!("extension profile needs 0 < a < b < 1, got a = {a}, b = {b}"));
        }
        Ok(Self { a, b })
    }

    /// The default `eta`: 1 on `[0, 1/4]`, 0 on `[3/4, 1]`.
    pub fn standard() -> Self {
        Self { a: 0.25, b: 0.75 }
    }

    /// A second admissible profile with a steeper, off-centre drop.
    pub fn alternative() -> Self {
        Self { a: 0.1, b: 0.55 }
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn eval(&self, t: f64) -> Jet {
        ramp(t, self.b, self.a)
    }
}
