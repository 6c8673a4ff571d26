use super::expr::Expr;
use super::jet::JetN;
use super::function::POSITIVITY_SAMPLES;
use crate::error::{LabError, Result};

/// Positive scalar field on a flat m-torus, with exact gradient and Hessian.
#[derive(Debug, Clone)]
pub struct ScalarFieldM {
    label: String,
    expr: Expr,
    periods: Vec<f64>,
}

impl ScalarFieldM {
    pub fn new(label: impl Into<String>, expr: Expr, periods: Vec<f64>) -> Result<Self> {
        if periods.is_empty() || periods.iter().any(|p| !(*p > 0.0)) {
            return Err(LabError::InvalidDomain(format!("torus periods must be positive, got {periods:?}")));
        }
        if expr.arity() > periods.len() {
            return Err(LabError::Precondition(format!(
                "expression uses {} coordinates but the torus has dimension {}",
                expr.arity(),
                periods.len()
            )));
        }
        let field = ScalarFieldM { label: label.into(), expr, periods };
        field.check_positive()?;
        Ok(field)
    }

    pub fn parse(src: &str, periods: Vec<f64>) -> Result<Self> {
        Self::new(src.trim(), Expr::parse(src)?, periods)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.periods.len()
    }

    pub fn periods(&self) -> &[f64] {
        &self.periods
    }

    /// Points per axis so that the tensor grid has roughly `POSITIVITY_SAMPLES` points.
    fn samples_per_axis(&self) -> usize {
        ((POSITIVITY_SAMPLES as f64).powf(1.0 / self.dim() as f64).ceil() as usize).max(2)
    }

    /// Tensor-product grid of `n` points per axis (periodic endpoints excluded).
    pub fn grid(&self, n: usize) -> Vec<Vec<f64>> {
        let m = self.dim();
        let total = n.pow(m as u32);
        (0..total)
            .map(|mut idx| {
                (0..m)
                    .map(|k| {
                        let i = idx % n;
                        idx /= n;
                        self.periods[k] * i as f64 / n as f64
                    })
                    .collect()
            })
            .collect()
    }

    fn check_positive(&self) -> Result<()> {
        for p in self.grid(self.samples_per_axis()) {
            self.jet(&p)?;
        }
        Ok(())
    }

    /// Value, gradient and Hessian at `point` (coordinates reduced modulo the periods).
    pub fn jet(&self, point: &[f64]) -> Result<JetN> {
        let m = self.dim();
        if point.len() != m {
            return Err(LabError::Precondition(format!("expected a point of dimension {m}, got {}", point.len())));
        }
        let vars: Vec<JetN> = point
            .iter()
            .zip(&self.periods)
            .enumerate()
            .map(|(k, (x, p))| JetN::variable(x.rem_euclid(*p), k, m))
            .collect();
        let j = self.expr.eval(&vars)?;
        if !(j.v > 0.0) {
            return Err(LabError::NonPositiveWarp { t: point[0], value: j.v });
        }
        Ok(j)
    }

    pub fn spread(&self, n: usize) -> Result<f64> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for p in self.grid(n) {
            let v = self.jet(&p)?.v;
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Ok(hi - lo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn hessian_symmetric_and_matches_fd() {
        let f = ScalarFieldM::parse("3 + cos(t1) * sin(t2) + 0.2*sin(t1 + 2*t2)", vec![2.0 * PI, 2.0 * PI]).unwrap();
        let p = [0.4, 1.1];
        let j = f.jet(&p).unwrap();
        assert_eq!(j.hess_at(0, 1), j.hess_at(1, 0));
        let h = 1e-4;
        let v = |x: f64, y: f64| f.jet(&[x, y]).unwrap().v;
        let fd_xy = (v(p[0] + h, p[1] + h) - v(p[0] + h, p[1] - h) - v(p[0] - h, p[1] + h) + v(p[0] - h, p[1] - h))
            / (4.0 * h * h);
        assert!((fd_xy - j.hess_at(0, 1)).abs() < 1e-6);
    }

    #[test]
    fn rejects_non_positive_fields() {
        assert!(ScalarFieldM::parse("cos(t1)", vec![2.0 * PI, 2.0 * PI]).is_err());
        assert!(ScalarFieldM::parse("2 + t3", vec![1.0, 1.0]).is_err());
    }
}
