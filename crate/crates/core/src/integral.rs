//! Integral inequality for the horizontal Ricci curvature of `M ×_f N`.
//!
//! Over a compact flat base,
//! `Σ_k ∫ Ric(E_k, E_k) = q(q-1) ∫ |∇f / f|^2 ≥ 0`, with equality exactly when
//! the warp is constant. Both sides are integrated independently here.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::geometry::{Warp, WarpedProductSpace};
use crate::quadrature::{pairwise_sum, torus_trapezoid, QuadratureRule, MAX_FAILED_DOUBLINGS};
use crate::warp::{Domain1D, WarpingFunction};

/// Relative residual allowed for the equality verdict.
pub const EQUALITY_RELATIVE_TOL: f64 = 1e-8;
/// Maximum warp spread for a product verdict.
pub const PRODUCT_SPREAD_TOL: f64 = 1e-10;
/// Cauchy tolerance of the node-doubling loop on periodic bases.
pub const CAUCHY_TOL: f64 = 1e-12;
/// Cauchy tolerance for Simpson windows.
pub const WINDOW_TOL: f64 = 1e-10;
const SPREAD_SAMPLES: usize = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    /// `Σ_k ∫ Ric(E_k, E_k) dM̄`
    pub lhs: f64,
    /// `q(q-1) ∫ |H|^2 dM̄`
    pub rhs: f64,
    pub residual: f64,
    pub product_verdict: bool,
    pub warp_spread: f64,
    pub fiber_dim: usize,
    pub nodes: usize,
    pub degenerate: Option<String>,
    /// `(nodes, lhs, rhs)` for each node count tried.
    pub history: Vec<(usize, f64, f64)>,
}

impl InequalityReport {
    pub fn relative_residual(&self) -> f64 {
        self.residual / self.rhs.abs().max(1.0)
    }
}

fn base_sum<F>(space: &WarpedProductSpace, field: &F, nodes: usize) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    match space.warp() {
        Warp::OneD(w) => {
            let d = w.domain();
            let (start, len) = d.span();
            QuadratureRule::for_domain(&d, nodes)?.apply(&|t| field(&[t]), start, len)
        }
        Warp::Torus(f) => torus_trapezoid(field, f.periods(), nodes),
    }
}

/// Both sides of the integral inequality, refined by node doubling from `nodes`.
pub fn theorem1_sides(space: &WarpedProductSpace, nodes: usize) -> Result<InequalityReport> {
    if !space.base_is_compact() {
        return Err(LabError::Precondition("the integral inequality needs a compact base (circle or torus)".into()));
    }
    let q = space.fiber_dim() as f64;
    let vol = space.fiber().volume;
    let qi = space.fiber_dim() as i32;

    let lhs_density = |p: &[f64]| -> Result<f64> {
        let j = space.warp_jet(p)?;
        Ok(space.ricci_trace(p)? * j.v.powi(qi))
    };
    let rhs_density = |p: &[f64]| -> Result<f64> {
        let j = space.warp_jet(p)?;
        let h2 = pairwise_sum(&j.grad.iter().map(|g| (g / j.v).powi(2)).collect::<Vec<_>>());
        Ok(h2 * j.v.powi(qi))
    };

    let evaluate = |n: usize| -> Result<(f64, f64)> {
        Ok((vol * base_sum(space, &lhs_density, n)?, q * (q - 1.0) * vol * base_sum(space, &rhs_density, n)?))
    };

    let mut n = nodes;
    let (mut lhs, mut rhs) = evaluate(n)?;
    let mut history = vec![(n, lhs, rhs)];
    let mut converged = false;
    let mut last_change = f64::INFINITY;
    for _ in 0..MAX_FAILED_DOUBLINGS {
        n *= 2;
        let (l2, r2) = evaluate(n)?;
        history.push((n, l2, r2));
        last_change = (l2 - lhs).abs().max((r2 - rhs).abs());
        let scale = l2.abs().max(r2.abs()).max(1.0);
        lhs = l2;
        rhs = r2;
        if last_change <= CAUCHY_TOL * scale {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(LabError::NonConvergence { nodes: n, last_change });
    }

    let warp_spread = match space.warp() {
        Warp::OneD(w) => w.spread(SPREAD_SAMPLES)?,
        Warp::Torus(f) => f.spread(((SPREAD_SAMPLES as f64).sqrt() as usize).max(2))?,
    };
    let residual = (lhs - rhs).abs();
    let product_verdict = residual <= EQUALITY_RELATIVE_TOL * (1.0 + rhs.abs()) && warp_spread <= PRODUCT_SPREAD_TOL;
    Ok(InequalityReport {
        lhs,
        rhs,
        residual,
        product_verdict,
        warp_spread,
        fiber_dim: space.fiber_dim(),
        nodes: n,
        degenerate: space.degeneracy_note().map(str::to_string),
        history,
    })
}

/// `-q Vol(N) ∫_a^b f'' f^(q-1) dt` over a window of the base. No sign is
/// implied: on a noncompact base this quantity can be negative.
pub fn noncompact_window_integral(
    wf: &WarpingFunction,
    q: usize,
    fiber_volume: f64,
    a: f64,
    b: f64,
    nodes: usize,
) -> Result<f64> {
    if !(a < b) {
        return Err(LabError::Precondition(format!("window must satisfy a < b, got [{a}, {b}]")));
    }
    if let Domain1D::Interval { a: lo, b: hi } = wf.domain() {
        if a < lo || b > hi {
            return Err(LabError::DomainError { t: if a < lo { a } else { b }, a: lo, b: hi });
        }
    }
    let window = Domain1D::interval(a, b)?;
    let qi = q as i32;
    let integrand = |t: f64| -> Result<f64> {
        let j = wf.jet(t)?;
        Ok(j.d2 * j.v.powi(qi - 1))
    };
    let r = crate::quadrature::integrate(QuadratureRule::for_domain(&window, nodes)?, integrand, &window, WINDOW_TOL)?;
    Ok(-(q as f64) * fiber_volume * r.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::FiberDescriptor;
    use crate::warp::catalog;
    use std::f64::consts::PI;

    #[test]
    fn constant_warp_is_a_product() {
        let s = WarpedProductSpace::over_line(catalog::constant(2.5).unwrap(), FiberDescriptor::sphere(3).unwrap());
        let r = theorem1_sides(&s, 64).unwrap();
        assert!(r.lhs.abs() <= 1e-12 && r.rhs.abs() <= 1e-12);
        assert!(r.product_verdict);
    }

    #[test]
    fn two_plus_cos_sides_equal_eight_pi_squared() {
        let s = WarpedProductSpace::over_line(catalog::two_plus_cos().unwrap(), FiberDescriptor::sphere(2).unwrap());
        let r = theorem1_sides(&s, 64).unwrap();
        let target = 8.0 * PI * PI;
        assert!((r.lhs - target).abs() / target < 1e-12);
        assert!((r.rhs - target).abs() / target < 1e-12);
        assert!(!r.product_verdict);
    }

    #[test]
    fn degenerate_fiber_sides_vanish() {
        let s = WarpedProductSpace::over_line(catalog::two_plus_cos().unwrap(), FiberDescriptor::circle(1.0).unwrap());
        let r = theorem1_sides(&s, 64).unwrap();
        assert!(r.lhs.abs() <= 1e-10 && r.rhs.abs() <= 1e-10);
        assert!(r.degenerate.is_some());
    }

    #[test]
    fn interval_base_is_rejected() {
        let s = WarpedProductSpace::over_line(catalog::cosh(1.0).unwrap(), FiberDescriptor::sphere(2).unwrap());
        assert!(matches!(theorem1_sides(&s, 64), Err(LabError::Precondition(_))));
    }

    #[test]
    fn window_examples() {
        let v = noncompact_window_integral(&catalog::cosh(1.0).unwrap(), 2, 4.0 * PI, -1.0, 1.0, 256).unwrap();
        // -8π ∫ cosh^2 = -8π (1 + sinh(2)/2)
        let expected = -8.0 * PI * (1.0 + (2.0f64).sinh() / 2.0);
        assert!((v - expected).abs() < 1e-9 * expected.abs());
        let aff = catalog::affine(1.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(noncompact_window_integral(&aff, 2, 1.0, 0.0, 1.0, 32).unwrap(), 0.0);
        let tpc = catalog::two_plus_cos().unwrap().with_domain(Domain1D::interval(0.0, 2.0 * PI).unwrap()).unwrap();
        assert!(noncompact_window_integral(&tpc, 1, 2.0 * PI, 0.0, 2.0 * PI, 64).unwrap().abs() < 1e-12);
        assert!(noncompact_window_integral(&aff, 2, 1.0, -1.0, 1.0, 32).is_err());
    }
}
