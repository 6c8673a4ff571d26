//! Closed-form curvature of warped products `M ×_f N` over a flat base.
//!
//! The fiber dimension is written `q` throughout. The base is a flat circle,
//! interval or torus, so its own Ricci tensor vanishes identically and every
//! horizontal Ricci component comes from the Hessian of the warp.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::quadrature::{integrate, integrate_torus, Integration, QuadratureRule};
use crate::warp::{Domain1D, JetN, JetScalar, ScalarFieldM, WarpingFunction};

/// Highest spherical-harmonic degree tabulated for sphere fibers.
const SPHERE_LEVELS: usize = 12;

/// Fiber `N` of the warped product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberDescriptor {
    pub dim: usize,
    pub volume: f64,
    /// `(eigenvalue, multiplicity)` of `-Δ_N` in increasing order, starting at 0.
    pub spectrum: Option<Vec<(f64, usize)>>,
}

fn binomial(n: i64, k: i64) -> i64 {
    if k < 0 || n < k {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1i64, |acc, i| acc * (n - i) / (i + 1))
}

/// Volume of the unit round sphere `S^q`.
pub fn sphere_volume(q: usize) -> f64 {
    // Vol(S^0) = 2, Vol(S^1) = 2π, Vol(S^q) = 2π/(q-1) Vol(S^{q-2})
    let (mut v, start) = if q % 2 == 0 { (2.0, 0) } else { (2.0 * PI, 1) };
    let mut k = start;
    while k < q {
        k += 2;
        v *= 2.0 * PI / (k - 1) as f64;
    }
    v
}

impl FiberDescriptor {
    /// Unit round sphere `S^q`: eigenvalues `k(k+q-1)`.
    pub fn sphere(q: usize) -> Result<Self> {
        if q == 0 {
            return Err(LabError::Precondition("fiber dimension must be at least 1".into()));
        }
        let qi = q as i64;
        let spectrum = (0..=SPHERE_LEVELS as i64)
            .map(|k| {
                let mult = binomial(k + qi, qi) - binomial(k + qi - 2, qi);
                ((k * (k + qi - 1)) as f64, mult as usize)
            })
            .collect();
        Ok(FiberDescriptor { dim: q, volume: sphere_volume(q), spectrum: Some(spectrum) })
    }

    /// Circle of the given radius: eigenvalues `(k/r)^2`.
    pub fn circle(radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(LabError::Precondition(format!("circle radius must be positive, got {radius}")));
        }
        let spectrum = (0..=SPHERE_LEVELS)
            .map(|k| (((k as f64) / radius).powi(2), if k == 0 { 1 } else { 2 }))
            .collect();
        Ok(FiberDescriptor { dim: 1, volume: 2.0 * PI * radius, spectrum: Some(spectrum) })
    }

    pub fn abstract_fiber(dim: usize, volume: f64, spectrum: Option<Vec<(f64, usize)>>) -> Result<Self> {
        if dim == 0 || !(volume > 0.0) {
            return Err(LabError::Precondition(format!("need dim >= 1 and volume > 0, got {dim}, {volume}")));
        }
        Ok(FiberDescriptor { dim, volume, spectrum })
    }

    /// The first `k` nonzero eigenvalues, repeated by multiplicity.
    pub fn nonzero_eigenvalues(&self, k: usize) -> Result<Vec<f64>> {
        let spectrum = self.spectrum.as_ref().ok_or(LabError::MissingSpectrum)?;
        Ok(spectrum
            .iter()
            .filter(|(l, _)| *l > 0.0)
            .flat_map(|(l, m)| std::iter::repeat(*l).take(*m))
            .take(k)
            .collect())
    }
}

/// The warp of a warped product: a function of one variable or a field on a torus.
#[derive(Debug, Clone)]
pub enum Warp {
    OneD(WarpingFunction),
    Torus(ScalarFieldM),
}

/// Tangent vector of `M ×_f N` split as `(base, fiber)`; the fiber part is in
/// an orthonormal frame of `g_N`, so its warped length is `f·|v|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitVector {
    pub base: Vec<f64>,
    pub fiber: Vec<f64>,
}

/// Geometry of a slice `{t} × N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceData {
    pub t: f64,
    pub scale: f64,
    pub mean_curvature: f64,
    pub umbilic: bool,
    pub totally_geodesic: bool,
}

#[derive(Debug, Clone)]
pub struct WarpedProductSpace {
    warp: Warp,
    fiber: FiberDescriptor,
}

pub const DEGENERATE_FIBER_NOTE: &str = "degenerate: horizontal Ricci formula assumes fiber dimension > 1";

impl WarpedProductSpace {
    pub fn new(warp: Warp, fiber: FiberDescriptor) -> Self {
        WarpedProductSpace { warp, fiber }
    }

    pub fn over_line(warp: WarpingFunction, fiber: FiberDescriptor) -> Self {
        Self::new(Warp::OneD(warp), fiber)
    }

    pub fn warp(&self) -> &Warp {
        &self.warp
    }

    pub fn fiber(&self) -> &FiberDescriptor {
        &self.fiber
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber.dim
    }

    pub fn base_dim(&self) -> usize {
        match &self.warp {
            Warp::OneD(_) => 1,
            Warp::Torus(f) => f.dim(),
        }
    }

    /// Compact base (circle or torus), as the integral inequality requires.
    pub fn base_is_compact(&self) -> bool {
        match &self.warp {
            Warp::OneD(w) => w.domain().is_circle(),
            Warp::Torus(_) => true,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.fiber.dim == 1
    }

    pub fn degeneracy_note(&self) -> Option<&'static str> {
        self.is_degenerate().then_some(DEGENERATE_FIBER_NOTE)
    }

    fn one_d(&self) -> Result<&WarpingFunction> {
        match &self.warp {
            Warp::OneD(w) => Ok(w),
            Warp::Torus(_) => Err(LabError::Precondition("operation requires a one-dimensional base".into())),
        }
    }

    /// Warp value, gradient and Hessian at a base point.
    pub fn warp_jet(&self, point: &[f64]) -> Result<JetN> {
        match &self.warp {
            Warp::OneD(w) => {
                if point.len() != 1 {
                    return Err(LabError::Precondition(format!("expected a 1-d point, got {}", point.len())));
                }
                let j = w.jet(point[0])?;
                Ok(JetN { v: j.v, grad: vec![j.d1], hess: vec![j.d2] })
            }
            Warp::Torus(f) => f.jet(point),
        }
    }

    /// `Ric(X, Y) = -(q/f) Hess f(X, Y)` for horizontal `X, Y`.
    pub fn ricci_horizontal(&self, point: &[f64], x: &[f64], y: &[f64]) -> Result<f64> {
        let j = self.warp_jet(point)?;
        let m = j.dim();
        if x.len() != m || y.len() != m {
            return Err(LabError::Precondition(format!("tangent vectors must have dimension {m}")));
        }
        let mut hxy = 0.0;
        for a in 0..m {
            for b in 0..m {
                hxy += x[a] * j.hess_at(a, b) * y[b];
            }
        }
        Ok(-(self.fiber.dim as f64) / j.v * hxy)
    }

    /// `Ric(∂t, ∂t) = -q f''/f` on a one-dimensional base.
    pub fn ricci_dt_dt(&self, t: f64) -> Result<f64> {
        self.one_d()?;
        self.ricci_horizontal(&[t], &[1.0], &[1.0])
    }

    /// `Σ_k Ric(E_k, E_k) = -(q/f) Δ^M f` over an orthonormal base frame.
    pub fn ricci_trace(&self, point: &[f64]) -> Result<f64> {
        let j = self.warp_jet(point)?;
        Ok(-(self.fiber.dim as f64) / j.v * j.laplacian())
    }

    /// Density `f^q` of the volume form relative to `dM dN`.
    pub fn volume_element(&self, point: &[f64]) -> Result<f64> {
        let j = self.warp_jet(point)?;
        Ok(j.v.powi(self.fiber.dim as i32))
    }

    /// Total volume `Vol(N) ∫_M f^q`.
    pub fn total_volume(&self, nodes: usize, tol: f64) -> Result<Integration> {
        let scale = self.fiber.volume;
        let mut r = self.integrate_base(|p| self.volume_element(p), nodes, tol)?;
        r.value *= scale;
        r.history.iter_mut().for_each(|h| h.1 *= scale);
        Ok(r)
    }

    /// Integrate a function of the base point over the base.
    pub fn integrate_base<F>(&self, field: F, nodes: usize, tol: f64) -> Result<Integration>
    where
        F: Fn(&[f64]) -> Result<f64> + Sync,
    {
        match &self.warp {
            Warp::OneD(w) => {
                let d = w.domain();
                integrate(QuadratureRule::for_domain(&d, nodes)?, |t| field(&[t]), &d, tol)
            }
            Warp::Torus(f) => integrate_torus(field, f.periods(), nodes, tol),
        }
    }

    /// `∇_X ∂t = H(t)(X - <X, ∂t> ∂t)`: only the vertical part survives.
    pub fn covariant_dt(&self, t: f64, x: &SplitVector) -> Result<SplitVector> {
        let h = self.one_d()?.mean_curvature(t)?;
        Ok(SplitVector { base: vec![0.0; x.base.len()], fiber: x.fiber.iter().map(|v| h * v).collect() })
    }

    /// Length of a split vector in the warped metric at `t`.
    pub fn warped_norm(&self, t: f64, x: &SplitVector) -> Result<f64> {
        let f = self.one_d()?.value(t)?;
        let b: f64 = x.base.iter().map(|v| v * v).sum();
        let v: f64 = x.fiber.iter().map(|v| v * v).sum();
        Ok((b + f * f * v).sqrt())
    }

    /// Residual of the pointwise identity `q Δu = -Σ Ric(E_k,E_k) + q(q-1)|H|^2`
    /// with `u = ln f`, where `Δu = Δ^M u + (q/f)<∇f, ∇u>`.
    pub fn log_warp_identity_residual(&self, point: &[f64]) -> Result<f64> {
        let f = self.warp_jet(point)?;
        let q = self.fiber.dim as f64;
        let u = f.chain(f.v.ln(), 1.0 / f.v, -1.0 / (f.v * f.v));
        let grad_dot: f64 = f.grad.iter().zip(&u.grad).map(|(a, b)| a * b).sum();
        let lap_u = u.laplacian() + q / f.v * grad_dot;
        let h2: f64 = f.grad.iter().map(|g| (g / f.v).powi(2)).sum();
        let ric = self.ricci_trace(point)?;
        Ok((q * lap_u + ric - q * (q - 1.0) * h2).abs())
    }

    pub fn slice(&self, t: f64) -> Result<SliceData> {
        let w = self.one_d()?;
        let j = w.jet(t)?;
        let h = j.d1 / j.v;
        Ok(SliceData { t, scale: j.v, mean_curvature: h, umbilic: true, totally_geodesic: h == 0.0 })
    }

    /// Domain of a one-dimensional base.
    pub fn base_domain(&self) -> Option<Domain1D> {
        match &self.warp {
            Warp::OneD(w) => Some(w.domain()),
            Warp::Torus(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::warp::catalog;
    use std::f64::consts::FRAC_PI_2;

    fn tpc(q: usize) -> WarpedProductSpace {
        WarpedProductSpace::over_line(catalog::two_plus_cos().unwrap(), FiberDescriptor::sphere(q).unwrap())
    }

    #[test]
    fn sphere_volumes_and_spectra() {
        assert!((sphere_volume(1) - 2.0 * PI).abs() < 1e-15);
        assert!((sphere_volume(2) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_volume(3) - 2.0 * PI * PI).abs() < 1e-14);
        let s2 = FiberDescriptor::sphere(2).unwrap();
        assert_eq!(s2.spectrum.as_ref().unwrap()[1], (2.0, 3));
        assert_eq!(s2.spectrum.as_ref().unwrap()[2], (6.0, 5));
        let s3 = FiberDescriptor::sphere(3).unwrap();
        assert_eq!(s3.spectrum.as_ref().unwrap()[1], (3.0, 4));
        let c = FiberDescriptor::circle(2.0).unwrap();
        assert_eq!(c.nonzero_eigenvalues(3).unwrap(), vec![0.25, 0.25, 1.0]);
    }

    #[test]
    fn ricci_examples() {
        let flat = WarpedProductSpace::over_line(catalog::constant(3.0).unwrap(), FiberDescriptor::sphere(2).unwrap());
        assert_eq!(flat.ricci_horizontal(&[0.3], &[1.0], &[1.0]).unwrap(), 0.0);
        assert!((tpc(2).ricci_horizontal(&[0.0], &[1.0], &[1.0]).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((tpc(2).ricci_dt_dt(PI).unwrap() + 2.0).abs() < 1e-15);
        assert!((tpc(3).ricci_dt_dt(0.0).unwrap() - 1.0).abs() < 1e-15);
        let field = ScalarFieldM::parse("3 + cos(t1)", vec![2.0 * PI, 2.0 * PI]).unwrap();
        let torus = WarpedProductSpace::new(Warp::Torus(field), FiberDescriptor::sphere(2).unwrap());
        assert_eq!(torus.ricci_horizontal(&[0.4, 0.9], &[0.0, 1.0], &[0.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn volume_examples() {
        assert_eq!(tpc(2).volume_element(&[0.0]).unwrap(), 9.0);
        let s = WarpedProductSpace::over_line(catalog::two_plus_cos().unwrap(), FiberDescriptor::circle(1.0).unwrap());
        let v = s.total_volume(16, 1e-13).unwrap();
        assert!((v.value - 8.0 * PI * PI).abs() < 1e-11);
    }

    #[test]
    fn covariant_dt_examples() {
        let s = tpc(2);
        let dt = SplitVector { base: vec![1.0], fiber: vec![0.0, 0.0] };
        assert_eq!(s.covariant_dt(0.7, &dt).unwrap().fiber, vec![0.0, 0.0]);
        // unit vertical vector at t = π/2 where f = 2
        let x = SplitVector { base: vec![0.0], fiber: vec![0.5, 0.0] };
        assert!((s.warped_norm(FRAC_PI_2, &x).unwrap() - 1.0).abs() < 1e-15);
        let y = s.covariant_dt(FRAC_PI_2, &x).unwrap();
        assert!((s.warped_norm(FRAC_PI_2, &y).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn degenerate_fiber_is_flagged() {
        assert!(tpc(1).degeneracy_note().is_some());
        assert!(tpc(2).degeneracy_note().is_none());
    }

    #[test]
    fn slice_data() {
        let s = tpc(2).slice(0.0).unwrap();
        assert!(s.totally_geodesic && s.umbilic && s.scale == 3.0);
        assert!(!tpc(2).slice(1.0).unwrap().totally_geodesic);
    }
}
