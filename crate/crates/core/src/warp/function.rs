use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::expr::Expr;
use super::jet::Jet2;
use super::schwarzschild::SchwarzschildTable;
use crate::error::{LabError, Result};

/// Number of points used to certify positivity at construction.
pub const POSITIVITY_SAMPLES: usize = 1024;

/// One-dimensional base: a closed interval or a circle of given period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Domain1D {
    Interval { a: f64, b: f64 },
    Circle { period: f64 },
}

impl Domain1D {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        let d = Domain1D::Interval { a, b };
        d.validate()?;
        Ok(d)
    }

    pub fn circle(period: f64) -> Result<Self> {
        let d = Domain1D::Circle { period };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Domain1D::Interval { a, b } if !(a < b) || !a.is_finite() || !b.is_finite() => {
                Err(LabError::InvalidDomain(format!("interval requires a < b, got [{a}, {b}]")))
            }
            Domain1D::Circle { period } if !(period > 0.0) || !period.is_finite() => {
                Err(LabError::InvalidDomain(format!("circle period must be positive, got {period}")))
            }
            _ => Ok(()),
        }
    }

    /// Left end and length of the fundamental domain.
    pub fn span(&self) -> (f64, f64) {
        match *self {
            Domain1D::Interval { a, b } => (a, b - a),
            Domain1D::Circle { period } => (0.0, period),
        }
    }

    pub fn is_circle(&self) -> bool {
        matches!(self, Domain1D::Circle { .. })
    }

    /// Map `t` into the domain: modulo the period on a circle, bounds-checked
    /// on an interval.
    pub fn reduce(&self, t: f64) -> Result<f64> {
        match *self {
            Domain1D::Circle { period } => Ok(t.rem_euclid(period)),
            Domain1D::Interval { a, b } => {
                let slack = 1e-12 * (b - a).max(1.0);
                if t < a - slack || t > b + slack || t.is_nan() {
                    Err(LabError::DomainError { t, a, b })
                } else {
                    Ok(t.clamp(a, b))
                }
            }
        }
    }

    /// `n` equispaced sample points; endpoints included on intervals, the
    /// periodic endpoint excluded on circles.
    pub fn sample_points(&self, n: usize) -> Vec<f64> {
        let (start, len) = self.span();
        match self {
            Domain1D::Circle { .. } => (0..n).map(|i| start + len * i as f64 / n as f64).collect(),
            Domain1D::Interval { .. } => {
                (0..n).map(|i| start + len * i as f64 / (n - 1).max(1) as f64).collect()
            }
        }
    }
}

#[derive(Clone)]
enum Source {
    Expression(Expr),
    Tabulated(Arc<SchwarzschildTable>),
}

/// A positive warping function `f` with exact first and second derivatives.
#[derive(Clone)]
pub struct WarpingFunction {
    label: String,
    domain: Domain1D,
    source: Source,
}

impl fmt::Debug for WarpingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WarpingFunction").field("label", &self.label).field("domain", &self.domain).finish()
    }
}

impl WarpingFunction {
    /// Build from a parsed expression in the single variable `t`.
    pub fn from_expr(label: impl Into<String>, expr: Expr, domain: Domain1D) -> Result<Self> {
        domain.validate()?;
        if expr.arity() > 1 {
            return Err(LabError::Precondition(format!(
                "warping function must depend on `t` only, found {} coordinates",
                expr.arity()
            )));
        }
        let wf = WarpingFunction { label: label.into(), domain, source: Source::Expression(expr) };
        wf.check_positive()?;
        Ok(wf)
    }

    pub fn parse(src: &str, domain: Domain1D) -> Result<Self> {
        Self::from_expr(src.trim(), Expr::parse(src)?, domain)
    }

    pub(crate) fn from_table(table: SchwarzschildTable) -> Result<Self> {
        let domain = Domain1D::interval(0.0, table.tmax())?;
        let wf = WarpingFunction {
            label: format!("schwarzschild(m={}, q={}, r0={})", table.mass(), table.exponent(), table.r0()),
            domain,
            source: Source::Tabulated(Arc::new(table)),
        };
        wf.check_positive()?;
        Ok(wf)
    }

    /// Same function restricted to (or reinterpreted on) another domain.
    pub fn with_domain(&self, domain: Domain1D) -> Result<Self> {
        domain.validate()?;
        let wf = WarpingFunction { domain, ..self.clone() };
        wf.check_positive()?;
        Ok(wf)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> Domain1D {
        self.domain
    }

    pub fn expression(&self) -> Option<&Expr> {
        match &self.source {
            Source::Expression(e) => Some(e),
            Source::Tabulated(_) => None,
        }
    }

    pub fn schwarzschild_table(&self) -> Option<&SchwarzschildTable> {
        match &self.source {
            Source::Tabulated(t) => Some(t),
            Source::Expression(_) => None,
        }
    }

    fn check_positive(&self) -> Result<()> {
        for t in self.domain.sample_points(POSITIVITY_SAMPLES) {
            self.jet(t)?;
        }
        Ok(())
    }

    /// `(f, f', f'')` at `t`.
    pub fn jet(&self, t: f64) -> Result<Jet2> {
        let t = self.domain.reduce(t)?;
        let j = match &self.source {
            Source::Expression(e) => e.eval(&[Jet2::variable(t)])?,
            Source::Tabulated(table) => table.jet(t)?,
        };
        if !(j.v > 0.0) {
            return Err(LabError::NonPositiveWarp { t, value: j.v });
        }
        Ok(j)
    }

    pub fn eval(&self, t: f64) -> Result<(f64, f64, f64)> {
        let j = self.jet(t)?;
        Ok((j.v, j.d1, j.d2))
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        Ok(self.jet(t)?.v)
    }

    /// `H = f'/f`, the mean curvature of the slice through `t`.
    pub fn mean_curvature(&self, t: f64) -> Result<f64> {
        let j = self.jet(t)?;
        Ok(j.d1 / j.v)
    }

    /// `H' = f''/f - (f'/f)^2`.
    pub fn mean_curvature_prime(&self, t: f64) -> Result<f64> {
        let j = self.jet(t)?;
        let h = j.d1 / j.v;
        Ok(j.d2 / j.v - h * h)
    }

    pub fn profile(&self) -> MeanCurvatureProfile<'_> {
        MeanCurvatureProfile { warp: self }
    }

    /// max f - min f over `n` sample points.
    pub fn spread(&self, n: usize) -> Result<f64> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for t in self.domain.sample_points(n) {
            let v = self.value(t)?;
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Ok(hi - lo)
    }
}

/// Slice mean curvature `H(t)` and its derivative, with sign reports.
#[derive(Debug, Clone, Copy)]
pub struct MeanCurvatureProfile<'a> {
    warp: &'a WarpingFunction,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignReport {
    pub samples: usize,
    pub min_h: f64,
    pub max_h: f64,
    pub min_h_prime: f64,
    /// H > 0 at every sample.
    pub h_positive: bool,
    /// H' >= 0 at every sample, i.e. f f'' - f'^2 >= 0.
    pub h_prime_nonnegative: bool,
}

impl MeanCurvatureProfile<'_> {
    pub fn h(&self, t: f64) -> Result<f64> {
        self.warp.mean_curvature(t)
    }

    pub fn h_prime(&self, t: f64) -> Result<f64> {
        self.warp.mean_curvature_prime(t)
    }

    pub fn sign_report(&self, samples: usize) -> Result<SignReport> {
        let mut min_h = f64::INFINITY;
        let mut max_h = f64::NEG_INFINITY;
        let mut min_hp = f64::INFINITY;
        for t in self.warp.domain.sample_points(samples) {
            let h = self.h(t)?;
            min_h = min_h.min(h);
            max_h = max_h.max(h);
            min_hp = min_hp.min(self.h_prime(t)?);
        }
        Ok(SignReport {
            samples,
            min_h,
            max_h,
            min_h_prime: min_hp,
            h_positive: min_h > 0.0,
            h_prime_nonnegative: min_hp >= 0.0,
        })
    }
}

/// Built-in warping functions.
pub mod catalog {
    use super::*;

    pub const NAMES: [&str; 5] = ["constant", "two-plus-cos", "cosh", "affine", "schwarzschild"];

    /// f ≡ c on the circle of period 2π.
    pub fn constant(c: f64) -> Result<WarpingFunction> {
        WarpingFunction::from_expr(format!("constant({c})"), Expr::Const(c), Domain1D::circle(2.0 * PI)?)
    }

    /// f = 2 + cos t on the circle of period 2π.
    pub fn two_plus_cos() -> Result<WarpingFunction> {
        WarpingFunction::from_expr("two-plus-cos", Expr::parse("2 + cos(t)")?, Domain1D::circle(2.0 * PI)?)
    }

    /// f = cosh t on [-half_width, half_width].
    pub fn cosh(half_width: f64) -> Result<WarpingFunction> {
        WarpingFunction::from_expr("cosh", Expr::parse("cosh(t)")?, Domain1D::interval(-half_width, half_width)?)
    }

    /// f = a + b t on [lo, hi].
    pub fn affine(a: f64, b: f64, lo: f64, hi: f64) -> Result<WarpingFunction> {
        let expr = Expr::Add(
            Box::new(Expr::Const(a)),
            Box::new(Expr::Mul(Box::new(Expr::Const(b)), Box::new(Expr::Var(0)))),
        );
        WarpingFunction::from_expr(format!("affine({a} + {b} t)"), expr, Domain1D::interval(lo, hi)?)
    }

    /// Every expression-backed catalog entry with its default parameters.
    pub fn defaults() -> Result<Vec<WarpingFunction>> {
        Ok(vec![constant(3.0)?, two_plus_cos()?, cosh(3.0)?, affine(1.0, 1.0, 0.0, 1.0)?])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn constant_entry() {
        let wf = catalog::constant(3.0).unwrap();
        assert_eq!(wf.eval(1.7).unwrap(), (3.0, 0.0, 0.0));
        assert_eq!(wf.mean_curvature(0.4).unwrap(), 0.0);
        assert_eq!(wf.mean_curvature_prime(0.4).unwrap(), 0.0);
    }

    #[test]
    fn two_plus_cos_values() {
        let wf = catalog::two_plus_cos().unwrap();
        let (f, f1, f2) = wf.eval(FRAC_PI_2).unwrap();
        assert!((f - 2.0).abs() < 1e-15 && (f1 + 1.0).abs() < 1e-15 && f2.abs() < 1e-15);
        assert_eq!(wf.eval(0.0).unwrap(), (3.0, 0.0, -1.0));
        assert!((wf.mean_curvature(FRAC_PI_2).unwrap() + 0.5).abs() < 1e-15);
        assert!((wf.mean_curvature_prime(0.0).unwrap() + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn circle_reduces_modulo_period() {
        let wf = catalog::two_plus_cos().unwrap();
        let a = wf.eval(1.0).unwrap();
        let b = wf.eval(1.0 + 4.0 * PI).unwrap();
        assert!((a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
    }

    #[test]
    fn interval_rejects_outside_points() {
        let wf = catalog::affine(1.0, 1.0, 0.0, 1.0).unwrap();
        assert!(matches!(wf.eval(1.5), Err(LabError::DomainError { .. })));
    }

    #[test]
    fn non_positive_warp_is_rejected() {
        let err = WarpingFunction::parse("cos(t)", Domain1D::circle(2.0 * PI).unwrap()).unwrap_err();
        assert!(matches!(err, LabError::NonPositiveWarp { .. }));
        assert!(Domain1D::interval(1.0, 1.0).is_err());
        assert!(Domain1D::circle(-2.0).is_err());
    }

    #[test]
    fn sign_report_on_cosh() {
        // H = tanh t changes sign; H' = sech^2 t > 0
        let r = catalog::cosh(1.0).unwrap().profile().sign_report(101).unwrap();
        assert!(!r.h_positive);
        assert!(r.h_prime_nonnegative);
    }
}
