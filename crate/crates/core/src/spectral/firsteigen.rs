//! Upper bound for the first eigenvalue of a closed curve `N` in the warped
//! surface `S¹ ×_f S¹`, metric `dt² + f(t)² dθ²`, using `φ = ⟨ξ, ∂t⟩` as a
//! Rayleigh test function.
//!
//! Along `N` with unit tangent `τ`, unit normal `ξ` and geodesic curvature
//! `κ = ⟨∇_τ τ, ξ⟩`, the shape operator is `A(τ) = κ τ`, the tangential part
//! of `∂t` is `T = ∂t - cos θ ξ` with `|T| = sin θ`, and
//! `d/dσ cos θ = -(κ + H cos θ) ⟨∂t, τ⟩`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::laplacian::DiscreteLaplacian;
use super::solvers::lowest_eigenpairs;
use crate::error::{LabError, Result};
use crate::quadrature::pairwise_sum;
use crate::warp::WarpingFunction;

/// Below this `∫cos²θ` (or the variance of `cos θ`) the test function is rejected.
pub const DEGENERATE_TOL: f64 = 1e-10;
const GL_NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
const GL_WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CurveShape {
    /// `(t_c + ρ cos α, θ_c + ρ sin α)`
    CoordinateCircle { center_t: f64, center_theta: f64, radius: f64 },
    /// `t ≡ t₀`
    Slice { t0: f64 },
    /// `θ ≡ θ₀`, once around the base circle.
    Meridian { theta0: f64 },
}

/// A closed curve `N` in `S¹ ×_f S¹`, parametrized by `α ∈ [0, 2π)`.
#[derive(Debug, Clone)]
pub struct ClosedCurveInSurface {
    pub warp: WarpingFunction,
    pub shape: CurveShape,
}

/// Angle data at one point of `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleSample {
    pub alpha: f64,
    pub t: f64,
    pub speed: f64,
    pub cos_theta: f64,
    /// `|T|` from its components.
    pub t_norm: f64,
    pub kappa: f64,
    pub mean_curvature: f64,
    /// `⟨∂t, τ⟩`
    pub dt_tau: f64,
}

impl ClosedCurveInSurface {
    pub fn new(warp: WarpingFunction, shape: CurveShape) -> Result<Self> {
        if !warp.domain().is_circle() {
            return Err(LabError::Precondition("the ambient surface needs a periodic warp".into()));
        }
        if let CurveShape::CoordinateCircle { radius, .. } = shape {
            let (_, period) = warp.domain().span();
            if !(radius > 0.0 && 2.0 * radius < period.min(2.0 * PI)) {
                return Err(LabError::Precondition(format!("coordinate circle radius {radius} does not fit the torus")));
            }
        }
        Ok(ClosedCurveInSurface { warp, shape })
    }

    /// `(t, θ)` with first and second `α`-derivatives.
    fn coords(&self, a: f64) -> [(f64, f64, f64); 2] {
        match self.shape {
            CurveShape::CoordinateCircle { center_t, center_theta, radius } => [
                (center_t + radius * a.cos(), -radius * a.sin(), -radius * a.cos()),
                (center_theta + radius * a.sin(), radius * a.cos(), -radius * a.sin()),
            ],
            CurveShape::Slice { t0 } => [(t0, 0.0, 0.0), (a, 1.0, 0.0)],
            CurveShape::Meridian { theta0 } => {
                let (_, period) = self.warp.domain().span();
                let c = period / (2.0 * PI);
                [(c * a, c, 0.0), (theta0, 0.0, 0.0)]
            }
        }
    }

    pub fn sample(&self, alpha: f64) -> Result<AngleSample> {
        let [(t, dt, ddt), (_, dth, ddth)] = self.coords(alpha);
        let j = self.warp.jet(t)?;
        let (f, f1) = (j.v, j.d1);
        let speed = (dt * dt + f * f * dth * dth).sqrt();
        // orthonormal frame (∂t, ∂θ/f)
        let tau = [dt / speed, f * dth / speed];
        let xi = [tau[1], -tau[0]];
        let acc_t = ddt - f * f1 * dth * dth;
        let acc_th = ddth + 2.0 * (f1 / f) * dt * dth;
        let acc = [acc_t, f * acc_th];
        let kappa = (acc[0] * xi[0] + acc[1] * xi[1]) / (speed * speed);
        let cos_theta = xi[0];
        let tv = [1.0 - cos_theta * xi[0], -cos_theta * xi[1]];
        Ok(AngleSample {
            alpha,
            t,
            speed,
            cos_theta,
            t_norm: tv[0].hypot(tv[1]),
            kappa,
            mean_curvature: f1 / f,
            dt_tau: tau[0],
        })
    }

    /// `∫_N g dσ` by the periodic trapezoid rule in `α`.
    pub fn integrate<F: Fn(&AngleSample) -> f64>(&self, g: F, nodes: usize) -> Result<f64> {
        let h = 2.0 * PI / nodes as f64;
        let terms: Vec<f64> = (0..nodes)
            .map(|i| self.sample(h * i as f64).map(|s| g(&s) * s.speed * h))
            .collect::<Result<_>>()?;
        Ok(pairwise_sum(&terms))
    }

    pub fn length(&self, nodes: usize) -> Result<f64> {
        self.integrate(|_| 1.0, nodes)
    }

    /// Closed-curve Laplacian with `nodes` uniform nodes in `α` and exact edge lengths.
    pub fn discretize(&self, nodes: usize) -> Result<DiscreteLaplacian> {
        let h = 2.0 * PI / nodes as f64;
        let edges: Vec<f64> = (0..nodes)
            .map(|i| {
                let (a, b) = (h * i as f64, h * (i + 1) as f64);
                let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
                let mut acc = 0.0;
                for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
                    acc += w * self.sample(mid + half * x)?.speed;
                }
                Ok(acc * half)
            })
            .collect::<Result<_>>()?;
        DiscreteLaplacian::closed_curve(&edges)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientIdentityCheck {
    pub steps: Vec<f64>,
    /// Max over samples of `|FD d/dσ cos θ + (κ + H cos θ)⟨∂t, τ⟩|` for each step.
    pub residuals: Vec<f64>,
    pub orders: Vec<f64>,
    /// `max | |T|² + cos²θ - 1 |`
    pub frame_defect: f64,
}

/// Compare central differences of `cos θ` along `N` with the closed form.
pub fn gradient_identity_check(curve: &ClosedCurveInSurface, steps: &[f64], samples: usize) -> Result<GradientIdentityCheck> {
    let mut residuals = Vec::with_capacity(steps.len());
    let mut frame_defect: f64 = 0.0;
    for &h in steps {
        let mut worst: f64 = 0.0;
        for i in 0..samples {
            let a = 2.0 * PI * (i as f64 + 0.25) / samples as f64;
            let s = curve.sample(a)?;
            frame_defect = frame_defect.max((s.t_norm * s.t_norm + s.cos_theta * s.cos_theta - 1.0).abs());
            let fd = (curve.sample(a + h)?.cos_theta - curve.sample(a - h)?.cos_theta) / (2.0 * h * s.speed);
            let closed = -(s.kappa + s.mean_curvature * s.cos_theta) * s.dt_tau;
            worst = worst.max((fd - closed).abs());
        }
        residuals.push(worst);
    }
    let orders = residuals.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    Ok(GradientIdentityCheck { steps: steps.to_vec(), residuals, orders, frame_defect })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstEigenBound {
    pub bound: f64,
    /// Discrete `λ₁(N)`.
    pub lambda1: f64,
    /// `(2π / ℓ)²`
    pub lambda1_exact: f64,
    pub margin: f64,
    pub shape_term: f64,
    pub mean_curvature_term: f64,
    pub test_norm_sq: f64,
    /// `∫_N cos θ / ℓ`
    pub test_function_mean: f64,
    /// Discrete `λ₁ Σ W φ̃²` and `φ̃ᵀ K φ̃` for the mean-free test function.
    pub rayleigh_lhs: f64,
    pub rayleigh_rhs: f64,
    pub nodes: usize,
}

/// `λ₁(N) ≤ [2∫‖A(T)‖² + 2∫H² cos²θ sin²θ] / ∫cos²θ`, with `λ₁` from the
/// discretized curve on `nodes` nodes.
pub fn theorem3_bound(curve: &ClosedCurveInSurface, nodes: usize) -> Result<FirstEigenBound> {
    let quad = nodes.max(512);
    let denom = curve.integrate(|s| s.cos_theta.powi(2), quad)?;
    let length = curve.length(quad)?;
    let mean = curve.integrate(|s| s.cos_theta, quad)? / length;
    let variance = curve.integrate(|s| (s.cos_theta - mean).powi(2), quad)?;
    if denom <= DEGENERATE_TOL {
        return Err(LabError::DegenerateTestFunction(denom));
    }
    if variance <= DEGENERATE_TOL * denom {
        return Err(LabError::DegenerateTestFunction(variance));
    }
    let shape = 2.0 * curve.integrate(|s| (s.kappa * s.t_norm).powi(2), quad)?;
    let meanc = 2.0 * curve.integrate(|s| (s.mean_curvature * s.cos_theta * s.t_norm).powi(2), quad)?;
    let bound = (shape + meanc) / denom;

    let l = curve.discretize(nodes)?;
    let lambda1 = lowest_eigenpairs(&l, 1, super::solvers::LANCZOS_SEED)?[0].value;
    let h = 2.0 * PI / nodes as f64;
    let phi: Vec<f64> = (0..nodes).map(|i| curve.sample(h * i as f64).map(|s| s.cos_theta)).collect::<Result<_>>()?;
    let ones = vec![1.0; nodes];
    let m = l.inner(&phi, &ones) / l.inner(&ones, &ones);
    let centered: Vec<f64> = phi.iter().map(|p| p - m).collect();
    Ok(FirstEigenBound {
        bound,
        lambda1,
        lambda1_exact: (2.0 * PI / length).powi(2),
        margin: bound - lambda1,
        shape_term: shape,
        mean_curvature_term: meanc,
        test_norm_sq: denom,
        test_function_mean: mean,
        rayleigh_lhs: lambda1 * l.inner(&centered, &centered),
        rayleigh_rhs: l.energy(&centered),
        nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::warp::catalog;

    fn circle_curve(wf: WarpingFunction) -> ClosedCurveInSurface {
        ClosedCurveInSurface::new(wf, CurveShape::CoordinateCircle { center_t: 0.0, center_theta: 1.0, radius: 1.0 })
            .unwrap()
    }

    #[test]
    fn frame_is_orthonormal() {
        let c = circle_curve(catalog::two_plus_cos().unwrap());
        for i in 0..20 {
            let s = c.sample(0.3 * i as f64).unwrap();
            assert!((s.t_norm.powi(2) + s.cos_theta.powi(2) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn flat_coordinate_circle_has_unit_curvature() {
        let c = ClosedCurveInSurface::new(
            catalog::constant(1.0).unwrap(),
            CurveShape::CoordinateCircle { center_t: 0.5, center_theta: 0.0, radius: 0.8 },
        )
        .unwrap();
        let s = c.sample(1.0).unwrap();
        assert!((s.kappa.abs() - 1.25).abs() < 1e-12);
    }

    #[test]
    fn gradient_identity_converges() {
        let c = circle_curve(catalog::two_plus_cos().unwrap());
        let g = gradient_identity_check(&c, &[1e-2, 5e-3, 2.5e-3], 32).unwrap();
        assert!(g.residuals.windows(2).all(|w| w[1] < w[0]));
        assert!(g.orders.iter().all(|o| *o >= 1.0));
        let flat = circle_curve(catalog::constant(2.0).unwrap());
        let gf = gradient_identity_check(&flat, &[1e-3], 16).unwrap();
        assert!(gf.residuals[0] < 1e-5);
    }

    #[test]
    fn meridian_test_function_vanishes() {
        let c = ClosedCurveInSurface::new(catalog::two_plus_cos().unwrap(), CurveShape::Meridian { theta0: 0.3 }).unwrap();
        assert!(c.sample(0.7).unwrap().cos_theta.abs() < 1e-15);
        let g = gradient_identity_check(&c, &[1e-3], 8).unwrap();
        assert!(g.residuals[0] < 1e-12);
        assert!(matches!(theorem3_bound(&c, 64), Err(LabError::DegenerateTestFunction(_))));
    }

    #[test]
    fn slice_is_degenerate() {
        let c = ClosedCurveInSurface::new(catalog::two_plus_cos().unwrap(), CurveShape::Slice { t0: 0.0 }).unwrap();
        assert!(matches!(theorem3_bound(&c, 64), Err(LabError::DegenerateTestFunction(_))));
    }

    #[test]
    fn bound_dominates_first_eigenvalue() {
        let c = circle_curve(catalog::two_plus_cos().unwrap());
        let b = theorem3_bound(&c, 256).unwrap();
        assert!(b.test_function_mean.abs() < 1e-12);
        assert!(b.margin >= -0.02 * b.lambda1, "{b:?}");
        assert!((b.lambda1 - b.lambda1_exact).abs() < 1e-3 * b.lambda1_exact);
        assert!(b.rayleigh_lhs <= b.rayleigh_rhs);
    }
}
