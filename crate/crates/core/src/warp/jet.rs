//! Second-order forward-mode jets.
//!
//! A jet carries a value together with its first and second derivatives and
//! propagates them exactly through arithmetic and elementary functions via the
//! chain rule `(φ∘u)'' = φ''(u)·u'⊗u' + φ'(u)·u''`.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar type an expression can be evaluated over.
pub trait JetScalar:
    Clone
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// A constant with the same shape (number of variables) as `like`.
    fn constant_like(c: f64, like: &Self) -> Self;

    fn value(&self) -> f64;

    /// Apply a scalar function given its value and first two derivatives at
    /// `self.value()`.
    fn chain(&self, phi: f64, dphi: f64, d2phi: f64) -> Self;
}

impl JetScalar for f64 {
    fn constant_like(c: f64, _like: &Self) -> Self {
        c
    }

    fn value(&self) -> f64 {
        *self
    }

    fn chain(&self, phi: f64, _dphi: f64, _d2phi: f64) -> Self {
        phi
    }
}

/// Univariate second-order jet `(f, f', f'')`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet2 {
    pub fn new(v: f64, d1: f64, d2: f64) -> Self {
        Self { v, d1, d2 }
    }

    /// The independent variable seeded at `t`.
    pub fn variable(t: f64) -> Self {
        Self { v: t, d1: 1.0, d2: 0.0 }
    }

    pub fn constant(c: f64) -> Self {
        Self { v: c, d1: 0.0, d2: 0.0 }
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        Jet2::new(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        Jet2::new(self.v - o.v, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        Jet2::new(
            self.v * o.v,
            self.d1 * o.v + self.v * o.d1,
            self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        )
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    fn div(self, o: Jet2) -> Jet2 {
        let inv = o.chain(1.0 / o.v, -1.0 / (o.v * o.v), 2.0 / (o.v * o.v * o.v));
        self * inv
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        Jet2::new(-self.v, -self.d1, -self.d2)
    }
}

impl JetScalar for Jet2 {
    fn constant_like(c: f64, _like: &Self) -> Self {
        Jet2::constant(c)
    }

    fn value(&self) -> f64 {
        self.v
    }

    fn chain(&self, phi: f64, dphi: f64, d2phi: f64) -> Self {
        Jet2::new(phi, dphi * self.d1, d2phi * self.d1 * self.d1 + dphi * self.d2)
    }
}

/// Multivariate second-order jet: value, gradient and (row-major) Hessian.
#[derive(Debug, Clone, PartialEq)]
pub struct JetN {
    pub v: f64,
    pub grad: Vec<f64>,
    pub hess: Vec<f64>,
}

impl JetN {
    pub fn constant(c: f64, dim: usize) -> Self {
        Self { v: c, grad: vec![0.0; dim], hess: vec![0.0; dim * dim] }
    }

    /// Coordinate `index` of a `dim`-dimensional point, seeded at `x`.
    pub fn variable(x: f64, index: usize, dim: usize) -> Self {
        let mut j = Self::constant(x, dim);
        j.grad[index] = 1.0;
        j
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn hess_at(&self, i: usize, j: usize) -> f64 {
        self.hess[i * self.dim() + j]
    }

    pub fn laplacian(&self) -> f64 {
        (0..self.dim()).map(|i| self.hess_at(i, i)).sum()
    }
}

impl Add for JetN {
    type Output = JetN;
    fn add(mut self, o: JetN) -> JetN {
        self.v += o.v;
        self.grad.iter_mut().zip(&o.grad).for_each(|(a, b)| *a += b);
        self.hess.iter_mut().zip(&o.hess).for_each(|(a, b)| *a += b);
        self
    }
}

impl Sub for JetN {
    type Output = JetN;
    fn sub(self, o: JetN) -> JetN {
        self + (-o)
    }
}

impl Mul for JetN {
    type Output = JetN;
    fn mul(self, o: JetN) -> JetN {
        let n = self.dim();
        let grad = (0..n).map(|i| self.grad[i] * o.v + self.v * o.grad[i]).collect();
        let mut hess = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                hess[i * n + j] = self.hess[i * n + j] * o.v
                    + self.grad[i] * o.grad[j]
                    + self.grad[j] * o.grad[i]
                    + self.v * o.hess[i * n + j];
            }
        }
        JetN { v: self.v * o.v, grad, hess }
    }
}

impl Div for JetN {
    type Output = JetN;
    fn div(self, o: JetN) -> JetN {
        let inv = o.chain(1.0 / o.v, -1.0 / (o.v * o.v), 2.0 / (o.v * o.v * o.v));
        self * inv
    }
}

impl Neg for JetN {
    type Output = JetN;
    fn neg(mut self) -> JetN {
        self.v = -self.v;
        self.grad.iter_mut().for_each(|a| *a = -*a);
        self.hess.iter_mut().for_each(|a| *a = -*a);
        self
    }
}

impl JetScalar for JetN {
    fn constant_like(c: f64, like: &Self) -> Self {
        JetN::constant(c, like.dim())
    }

    fn value(&self) -> f64 {
        self.v
    }

    fn chain(&self, phi: f64, dphi: f64, d2phi: f64) -> Self {
        let n = self.dim();
        let grad = self.grad.iter().map(|g| dphi * g).collect();
        let mut hess = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                hess[i * n + j] = d2phi * self.grad[i] * self.grad[j] + dphi * self.hess[i * n + j];
            }
        }
        JetN { v: phi, grad, hess }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule_second_order() {
        // (t^2)(t^3) = t^5 at t = 2: 32, 80, 160
        let t = Jet2::variable(2.0);
        let p = (t * t) * (t * t * t);
        assert_eq!(p, Jet2::new(32.0, 80.0, 160.0));
    }

    #[test]
    fn quotient_matches_closed_form() {
        // 1/t at t = 2: 1/2, -1/4, 2/8
        let t = Jet2::variable(2.0);
        let q = Jet2::constant(1.0) / t;
        assert!((q.v - 0.5).abs() < 1e-15);
        assert!((q.d1 + 0.25).abs() < 1e-15);
        assert!((q.d2 - 0.25).abs() < 1e-15);
    }

    #[test]
    fn multivariate_hessian_is_symmetric() {
        let x = JetN::variable(0.3, 0, 2);
        let y = JetN::variable(-1.2, 1, 2);
        let f = x.clone() * y.clone() * y.clone() + x.clone() / y;
        assert_eq!(f.hess_at(0, 1), f.hess_at(1, 0));
        // d²/dxdy (x y² + x/y) = 2y - 1/y²
        let expected = 2.0 * -1.2 - 1.0 / (1.2 * 1.2);
        assert!((f.hess_at(0, 1) - expected).abs() < 1e-14);
    }
}
