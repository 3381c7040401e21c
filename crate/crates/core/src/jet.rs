//! Second-order forward-mode jets in two variables.

use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Value, gradient and (symmetric) Hessian of a scalar function of `(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Jet2 {
    pub value: f64,
    pub du: f64,
    pub dv: f64,
    pub duu: f64,
    pub duv: f64,
    pub dvv: f64,
}

impl Jet2 {
    pub const fn constant(value: f64) -> Self {
        Jet2 {
            value,
            du: 0.0,
            dv: 0.0,
            duu: 0.0,
            duv: 0.0,
            dvv: 0.0,
        }
    }

    /// The coordinate function `u` seeded at `u`.
    pub const fn var_u(u: f64) -> Self {
        Jet2 {
            du: 1.0,
            ..Jet2::constant(u)
        }
    }

    pub const fn var_v(v: f64) -> Self {
        Jet2 {
            dv: 1.0,
            ..Jet2::constant(v)
        }
    }

    pub fn gradient(&self) -> [f64; 2] {
        [self.du, self.dv]
    }

    pub fn hessian(&self) -> [f64; 3] {
        [self.duu, self.duv, self.dvv]
    }

    pub fn is_constant(&self) -> bool {
        self.du == 0.0 && self.dv == 0.0 && self.duu == 0.0 && self.duv == 0.0 && self.dvv == 0.0
    }

    pub fn is_finite(&self) -> bool {
        [self.value, self.du, self.dv, self.duu, self.duv, self.dvv]
            .iter()
            .all(|x| x.is_finite())
    }

    /// Compose with a scalar function `g` given `g(x)`, `g'(x)`, `g''(x)` at `x = self.value`.
    pub fn chain(&self, g0: f64, g1: f64, g2: f64) -> Self {
        Jet2 {
            value: g0,
            du: g1 * self.du,
            dv: g1 * self.dv,
            duu: g2 * self.du * self.du + g1 * self.duu,
            duv: g2 * self.du * self.dv + g1 * self.duv,
            dvv: g2 * self.dv * self.dv + g1 * self.dvv,
        }
    }

    pub fn scale(&self, k: f64) -> Self {
        Jet2 {
            value: k * self.value,
            du: k * self.du,
            dv: k * self.dv,
            duu: k * self.duu,
            duv: k * self.duv,
            dvv: k * self.dvv,
        }
    }

    /// Integer power by the closed-form derivative; `x^n` with `x = 0` and
    /// `n < 0` is the caller's problem.
    pub fn powi(&self, n: i32) -> Self {
        let x = self.value;
        let g0 = x.powi(n);
        let g1 = if n == 0 {
            0.0
        } else {
            f64::from(n) * x.powi(n - 1)
        };
        let g2 = if n == 0 || n == 1 {
            0.0
        } else {
            f64::from(n) * f64::from(n - 1) * x.powi(n - 2)
        };
        self.chain(g0, g1, g2)
    }

    /// `self^p` for a real constant `p`; requires a positive base.
    pub fn powf(&self, p: f64) -> Self {
        let x = self.value;
        self.chain(
            x.powf(p),
            p * x.powf(p - 1.0),
            p * (p - 1.0) * x.powf(p - 2.0),
        )
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    pub fn ln(&self) -> Self {
        let x = self.value;
        self.chain(x.ln(), 1.0 / x, -1.0 / (x * x))
    }

    pub fn sqrt(&self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.value))
    }

    pub fn recip(&self) -> Self {
        let x = self.value;
        let r = 1.0 / x;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        Jet2 {
            value: self.value + o.value,
            du: self.du + o.du,
            dv: self.dv + o.dv,
            duu: self.duu + o.duu,
            duv: self.duv + o.duv,
            dvv: self.dvv + o.dvv,
        }
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        Jet2 {
            value: self.value - o.value,
            du: self.du - o.du,
            dv: self.dv - o.dv,
            duu: self.duu - o.duu,
            duv: self.duv - o.duv,
            dvv: self.dvv - o.dvv,
        }
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        let (a, b) = (self, o);
        Jet2 {
            value: a.value * b.value,
            du: a.du * b.value + a.value * b.du,
            dv: a.dv * b.value + a.value * b.dv,
            duu: a.duu * b.value + 2.0 * a.du * b.du + a.value * b.duu,
            duv: a.duv * b.value + a.du * b.dv + a.dv * b.du + a.value * b.duv,
            dvv: a.dvv * b.value + 2.0 * a.dv * b.dv + a.value * b.dvv,
        }
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, k: f64) -> Jet2 {
        self.scale(k)
    }
}

impl Mul<Jet2> for f64 {
    type Output = Jet2;
    fn mul(self, j: Jet2) -> Jet2 {
        j.scale(self)
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(self, k: f64) -> Jet2 {
        Jet2 {
            value: self.value + k,
            ..self
        }
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet2) -> Jet2 {
        self * o.recip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_has_no_derivatives() {
        let c = Jet2::constant(3.5);
        assert!(c.is_constant());
        assert_eq!(c.gradient(), [0.0, 0.0]);
        assert_eq!(c.hessian(), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn product_rule_on_uv() {
        let j = Jet2::var_u(2.0) * Jet2::var_v(3.0);
        assert_eq!(j.value, 6.0);
        assert_eq!(j.gradient(), [3.0, 2.0]);
        assert_eq!(j.hessian(), [0.0, 1.0, 0.0]);
    }

    #[test]
    fn powi_handles_small_exponents_at_zero() {
        let z = Jet2::var_u(0.0);
        let p1 = z.powi(1);
        assert_eq!((p1.value, p1.du, p1.duu), (0.0, 1.0, 0.0));
        let p2 = z.powi(2);
        assert_eq!((p2.value, p2.du, p2.duu), (0.0, 0.0, 2.0));
        let p0 = z.powi(0);
        assert!(p0.is_constant());
        assert_eq!(p0.value, 1.0);
    }

    #[test]
    fn quotient_matches_closed_form() {
        // u / v at (1, 2): grad (1/v, -u/v^2), hess (0, -1/v^2, 2u/v^3)
        let j = Jet2::var_u(1.0) / Jet2::var_v(2.0);
        assert_eq!(j.value, 0.5);
        assert_eq!(j.gradient(), [0.5, -0.25]);
        assert_eq!(j.hessian(), [0.0, -0.25, 0.25]);
    }
}
