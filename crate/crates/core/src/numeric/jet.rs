//! Second-order forward-mode derivatives.
//!
//! A [`Jet`] carries a value together with its first and second derivative
//! with respect to a single scalar variable. Metric coefficients are written
//! once as jets and every derived quantity (arclength derivatives, mean and
//! scalar curvature, conformal products) follows by the chain rule.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub const fn new(v: f64, d1: f64, d2: f64) -> Self {
        Self { v, d1, d2 }
    }

    pub const fn constant(v: f64) -> Self {
        Self { v, d1: 0.0, d2: 0.0 }
    }

    /// The independent variable itself at `x`.
    pub const fn variable(x: f64) -> Self {
        Self { v: x, d1: 1.0, d2: 0.0 }
    }

    /// Applies a scalar function given its value and first two derivatives
    /// at `self.v`.
    #[inline]
    pub fn chain(self, f: f64, df: f64, ddf: f64) -> Self {
        Self {
            v: f,
            d1: df * self.d1,
            d2: ddf * self.d1 * self.d1 + df * self.d2,
        }
    }

    pub fn powf(self, p: f64) -> Self {
        if p == 0.0 {
            return Self::constant(1.0);
        }
        let x = self.v;
        if x == 0.0 {
            // Only the value is meaningful at the origin; derivatives may blow up.
            let df = if p == 1.0 {
                1.0
            } else if p > 1.0 {
                0.0
            } else {
                f64::INFINITY
            };
            let ddf = if p == 2.0 {
                2.0
            } else if p > 2.0 || p == 1.0 {
                0.0
            } else {
                f64::INFINITY
            };
            return self.chain(0.0, df, ddf);
        }
        let f = x.powf(p);
        let df = p * f / x;
        let ddf = (p - 1.0) * df / x;
        self.chain(f, df, ddf)
    }

    pub fn powi(self, n: i32) -> Self {
        match n {
            0 => Self::constant(1.0),
            1 => self,
            2 => self * self,
            _ => {
                let x = self.v;
                let f = x.powi(n);
                let df = n as f64 * x.powi(n - 1);
                let ddf = (n * (n - 1)) as f64 * x.powi(n - 2);
                self.chain(f, df, ddf)
            }
        }
    }

    pub fn sqrt(self) -> Self {
        self.powf(0.5)
    }

    pub fn recip(self) -> Self {
        let x = self.v;
        let f = 1.0 / x;
        self.chain(f, -f * f, 2.0 * f * f * f)
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn ln(self) -> Self {
        let x = self.v;
        self.chain(x.ln(), 1.0 / x, -1.0 / (x * x))
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }

    /// Composition `self(inner)`: `self` holds the outer function's value and
    /// derivatives evaluated at `inner.v`.
    pub fn compose(self, inner: Jet) -> Self {
        Self {
            v: self.v,
            d1: self.d1 * inner.d1,
            d2: self.d2 * inner.d1 * inner.d1 + self.d1 * inner.d2,
        }
    }

    pub fn scale(self, c: f64) -> Self {
        Self {
            v: c * self.v,
            d1: c * self.d1,
            d2: c * self.d2,
        }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet::new(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet::new(self.v - o.v, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet::new(
            self.v * o.v,
            self.d1 * o.v + self.v * o.d1,
            self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        )
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet::new(-self.v, -self.d1, -self.d2)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, c: f64) -> Jet {
        Jet::new(self.v + c, self.d1, self.d2)
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(self, c: f64) -> Jet {
        Jet::new(self.v - c, self.d1, self.d2)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, c: f64) -> Jet {
        self.scale(c)
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, c: f64) -> Jet {
        self.scale(1.0 / c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd(f: impl Fn(f64) -> f64, x: f64) -> (f64, f64) {
        let h = 1e-4;
        let d1 = (f(x + h) - f(x - h)) / (2.0 * h);
        let d2 = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
        (d1, d2)
    }

    #[test]
    fn product_quotient_and_powers_match_finite_differences() {
        let x = 1.3;
        let g = |t: Jet| (t.powf(1.5) * t.sin() + t.exp()) / (t * t + 1.0);
        let j = g(Jet::variable(x));
        let gf = |t: f64| (t.powf(1.5) * t.sin() + t.exp()) / (t * t + 1.0);
        let (d1, d2) = fd(gf, x);
        assert!((j.v - gf(x)).abs() < 1e-14);
        assert!((j.d1 - d1).abs() < 1e-7);
        assert!((j.d2 - d2).abs() < 1e-5);
    }

    #[test]
    fn composition_is_chain_rule() {
        let x = 0.7;
        let inner = Jet::variable(x).powi(3);
        let outer = Jet::variable(inner.v).ln();
        let j = outer.compose(inner);
        assert!((j.d1 - 3.0 / x).abs() < 1e-13);
        assert!((j.d2 + 3.0 / (x * x)).abs() < 1e-12);
    }

    #[test]
    fn powers_at_origin_keep_value() {
        let j = Jet::variable(0.0).powf(4.0 / 3.0);
        assert_eq!(j.v, 0.0);
        assert_eq!(j.d1, 0.0);
        assert!(Jet::variable(0.0).powf(2.0).d2 == 2.0);
    }
}
