//! Height function along curves in the warped surface `R ×_f S¹`, metric
//! `dt² + f(t)² dθ²`.
//!
//! For an arclength curve the Laplacian of the height `h = t` is `h''(σ)`. The
//! other side, `H(h)(1 - |∇h|²) + ⟨∂t, H_Σ⟩`, is assembled from exact
//! derivatives of the curve in its own parameter and the Christoffel symbols
//! of the warped metric, so the two sides share no finite differences.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{LabError, Result};
use crate::warp::WarpingFunction;

const ARC_PANELS: usize = 256;
const GL_NODES: [f64; 5] = [0.0, -0.538_469_310_105_683_1, 0.538_469_310_105_683_1, -0.906_179_845_938_664, 0.906_179_845_938_664];
const GL_WEIGHTS: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_099_366_5,
    0.478_628_670_099_366_5,
    0.236_926_885_056_189_1,
    0.236_926_885_056_189_1,
];

/// `x(τ) = x₀ + rate·τ + Σ a sin(2π k τ + p)` for `τ ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigCoordinate {
    pub offset: f64,
    pub rate: f64,
    /// `(amplitude, frequency k, phase)`
    pub terms: Vec<(f64, f64, f64)>,
}

impl TrigCoordinate {
    fn eval(&self, tau: f64) -> (f64, f64, f64) {
        let mut v = self.offset + self.rate * tau;
        let mut d1 = self.rate;
        let mut d2 = 0.0;
        for &(a, k, p) in &self.terms {
            let w = 2.0 * PI * k;
            let arg = w * tau + p;
            v += a * arg.sin();
            d1 += a * w * arg.cos();
            d2 -= a * w * w * arg.sin();
        }
        (v, d1, d2)
    }
}

/// A smooth curve `(t(τ), θ(τ))` in `R ×_f S¹`, reparametrized by arclength.
#[derive(Debug, Clone)]
pub struct CurveInWarpedSurface {
    warp: WarpingFunction,
    t: TrigCoordinate,
    theta: TrigCoordinate,
    cumulative: Vec<f64>,
}

/// Both sides of the height identity at one arclength sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeightSample {
    pub sigma: f64,
    pub laplacian: f64,
    pub rhs: f64,
    /// `⟨∂t, H_Σ⟩`
    pub normal_term: f64,
    pub gradient_sq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeightCheck {
    pub step: f64,
    pub max_residual: f64,
    pub samples: Vec<HeightSample>,
}

impl CurveInWarpedSurface {
    pub fn new(warp: WarpingFunction, t: TrigCoordinate, theta: TrigCoordinate) -> Result<Self> {
        let mut curve = CurveInWarpedSurface { warp, t, theta, cumulative: Vec::new() };
        let h = 1.0 / ARC_PANELS as f64;
        let mut cumulative = vec![0.0];
        for i in 0..ARC_PANELS {
            let piece = curve.speed_integral(h * i as f64, h * (i + 1) as f64)?;
            if !(piece > 0.0) {
                return Err(LabError::Precondition("curve must be regular".into()));
            }
            cumulative.push(cumulative[i] + piece);
        }
        curve.cumulative = cumulative;
        Ok(curve)
    }

    /// The slice `t ≡ t₀`, traversed once around the circle.
    pub fn slice(warp: WarpingFunction, t0: f64) -> Result<Self> {
        Self::new(
            warp,
            TrigCoordinate { offset: t0, rate: 0.0, terms: vec![] },
            TrigCoordinate { offset: 0.0, rate: 2.0 * PI, terms: vec![] },
        )
    }

    /// The vertical line `θ ≡ θ₀` over `t ∈ [a, b]`.
    pub fn vertical(warp: WarpingFunction, theta0: f64, a: f64, b: f64) -> Result<Self> {
        Self::new(
            warp,
            TrigCoordinate { offset: a, rate: b - a, terms: vec![] },
            TrigCoordinate { offset: theta0, rate: 0.0, terms: vec![] },
        )
    }

    /// A seeded random regular curve whose `θ` is strictly monotone.
    pub fn random(warp: WarpingFunction, rng: &mut impl Rng) -> Result<Self> {
        let mut t_terms = Vec::new();
        for _ in 0..2 {
            t_terms.push((rng.gen_range(-0.3..0.3), rng.gen_range(1..=3) as f64, rng.gen_range(0.0..2.0 * PI)));
        }
        let rate: f64 = rng.gen_range(1.0..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let mut theta_terms = Vec::new();
        for _ in 0..2 {
            let k = rng.gen_range(1..=3) as f64;
            let cap = rate.abs() / (8.0 * PI * k);
            theta_terms.push((rng.gen_range(-cap..cap), k, rng.gen_range(0.0..2.0 * PI)));
        }
        Self::new(
            warp,
            TrigCoordinate { offset: rng.gen_range(0.0..2.0 * PI), rate: rng.gen_range(-1.0..1.0), terms: t_terms },
            TrigCoordinate { offset: rng.gen_range(0.0..2.0 * PI), rate, terms: theta_terms },
        )
    }

    pub fn length(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    fn speed(&self, tau: f64) -> Result<f64> {
        let (t, dt, _) = self.t.eval(tau);
        let (_, dth, _) = self.theta.eval(tau);
        let f = self.warp.value(t)?;
        Ok((dt * dt + f * f * dth * dth).sqrt())
    }

    fn speed_integral(&self, a: f64, b: f64) -> Result<f64> {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            acc += w * self.speed(mid + half * x)?;
        }
        Ok(acc * half)
    }

    /// Curve parameter `τ` at arclength `σ`.
    pub fn tau_at(&self, sigma: f64) -> Result<f64> {
        let i = match self.cumulative.binary_search_by(|c| c.partial_cmp(&sigma).unwrap()) {
            Ok(i) => i.min(ARC_PANELS - 1),
            Err(i) => i.saturating_sub(1).min(ARC_PANELS - 1),
        };
        let h = 1.0 / ARC_PANELS as f64;
        let a = h * i as f64;
        let (s0, s1) = (self.cumulative[i], self.cumulative[i + 1]);
        let mut tau = a + h * (sigma - s0) / (s1 - s0);
        for _ in 0..50 {
            let g = s0 + self.speed_integral(a, tau)? - sigma;
            let step = g / self.speed(tau)?;
            tau -= step;
            if step.abs() <= 1e-16 {
                break;
            }
        }
        Ok(tau)
    }

    /// Height `t` at arclength `σ`.
    pub fn height(&self, sigma: f64) -> Result<f64> {
        Ok(self.t.eval(self.tau_at(sigma)?).0)
    }

    /// `(H(h)(1 - |∇h|²) + ⟨∂t, H_Σ⟩, ⟨∂t, H_Σ⟩, |∇h|²)` at arclength `σ`.
    pub fn identity_rhs(&self, sigma: f64) -> Result<(f64, f64, f64)> {
        let tau = self.tau_at(sigma)?;
        let (t, dt, ddt) = self.t.eval(tau);
        let (_, dth, ddth) = self.theta.eval(tau);
        let j = self.warp.jet(t)?;
        let (f, f1) = (j.v, j.d1);
        // covariant acceleration: Γ^t_θθ = -f f', Γ^θ_tθ = f'/f
        let acc_t = ddt - f * f1 * dth * dth;
        let acc_th = ddth + 2.0 * (f1 / f) * dt * dth;
        let speed2 = dt * dt + f * f * dth * dth;
        let along = (acc_t * dt + f * f * acc_th * dth) / speed2;
        let kappa_t = (acc_t - along * dt) / speed2;
        let grad_sq = dt * dt / speed2;
        Ok(((f1 / f) * (1.0 - grad_sq) + kappa_t, kappa_t, grad_sq))
    }

    /// Compare `h''(σ)` by central differences with step `step` against the
    /// closed-form side at `samples` interior arclength points.
    pub fn height_laplacian_check(&self, step: f64, samples: usize) -> Result<HeightCheck> {
        if !(step > 0.0) || samples == 0 {
            return Err(LabError::Precondition("need a positive step and at least one sample".into()));
        }
        let len = self.length();
        let margin = (2.0 * step).max(0.05 * len);
        let mut out = Vec::with_capacity(samples);
        let mut max_residual: f64 = 0.0;
        for i in 0..samples {
            let sigma = margin + (len - 2.0 * margin) * (i as f64 + 0.5) / samples as f64;
            let lap = (self.height(sigma + step)? - 2.0 * self.height(sigma)? + self.height(sigma - step)?) / (step * step);
            let (rhs, normal_term, gradient_sq) = self.identity_rhs(sigma)?;
            max_residual = max_residual.max((lap - rhs).abs());
            out.push(HeightSample { sigma, laplacian: lap, rhs, normal_term, gradient_sq });
        }
        Ok(HeightCheck { step, max_residual, samples: out })
    }
}

/// Observed orders `log₂(e_k / e_{k+1})` of the height check under step halving.
pub fn height_order_study(curve: &CurveInWarpedSurface, steps: &[f64], samples: usize) -> Result<Vec<f64>> {
    let errors: Vec<f64> = steps
        .iter()
        .map(|h| curve.height_laplacian_check(*h, samples).map(|c| c.max_residual))
        .collect::<Result<_>>()?;
    Ok(errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect())
}

/// `count` seeded random curves in `R ×_f S¹`.
pub fn random_curves(warp: &WarpingFunction, count: usize, seed: u64) -> Result<Vec<CurveInWarpedSurface>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| CurveInWarpedSurface::random(warp.clone(), &mut rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::warp::catalog;

    #[test]
    fn slice_normal_term_is_minus_h() {
        let wf = catalog::two_plus_cos().unwrap();
        let t0 = 1.1;
        let c = CurveInWarpedSurface::slice(wf.clone(), t0).unwrap();
        let (rhs, normal, grad) = c.identity_rhs(0.7).unwrap();
        assert!(grad.abs() < 1e-15);
        assert!((normal + wf.mean_curvature(t0).unwrap()).abs() < 1e-14);
        assert!(rhs.abs() < 1e-14);
        assert!(c.height_laplacian_check(1e-3, 8).unwrap().max_residual < 1e-8);
    }

    #[test]
    fn vertical_geodesic_in_product() {
        let c = CurveInWarpedSurface::vertical(catalog::constant(1.5).unwrap(), 0.4, 0.0, 2.0).unwrap();
        let r = c.height_laplacian_check(1e-3, 10).unwrap();
        assert!(r.max_residual < 1e-8);
        assert!(r.samples.iter().all(|s| s.rhs.abs() < 1e-14));
    }

    #[test]
    fn random_curves_converge_at_second_order() {
        let wf = catalog::two_plus_cos().unwrap();
        for c in random_curves(&wf, 3, 11).unwrap() {
            let orders = height_order_study(&c, &[2e-2, 1e-2, 5e-3], 16).unwrap();
            for o in orders {
                assert!((o - 2.0).abs() < 0.3, "order {o}");
            }
        }
    }
}
