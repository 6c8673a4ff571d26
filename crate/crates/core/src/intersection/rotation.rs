//! Rotation hypersurfaces `φ(s, Φ) = (x₁(s), r(s) Φ)` in `R^{n+1}`.
//!
//! Profiles are parametrized by arclength, so the induced metric is
//! `ds² + r(s)² g_{S^{n-1}}`. A graph profile `(t, f(t))` is reparametrized
//! through the arclength map `s(t) = ∫ sqrt(1 + f'²)`.

use crate::error::{LabError, Result};
use crate::warp::{Domain1D, WarpingFunction};

const GL_NODES: [f64; 5] = [0.0, -0.538_469_310_105_683_1, 0.538_469_310_105_683_1, -0.906_179_845_938_664, 0.906_179_845_938_664];
const GL_WEIGHTS: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_099_366_5,
    0.478_628_670_099_366_5,
    0.236_926_885_056_189_1,
    0.236_926_885_056_189_1,
];
const ARCLENGTH_PANELS: usize = 2048;

/// Profile data at one arclength value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileJet {
    pub x1: f64,
    pub dx1: f64,
    pub d2x1: f64,
    pub r: f64,
    pub dr: f64,
    pub d2r: f64,
}

/// Cumulative arclength of a graph `(t, f(t))` over one fundamental span.
#[derive(Debug, Clone)]
struct ArclengthMap {
    start: f64,
    len: f64,
    periodic: bool,
    knots: Vec<f64>,
    cumulative: Vec<f64>,
}

fn speed(wf: &WarpingFunction, t: f64) -> Result<f64> {
    let j = wf.jet(t)?;
    Ok((1.0 + j.d1 * j.d1).sqrt())
}

fn gauss_legendre<F: Fn(f64) -> Result<f64>>(f: F, a: f64, b: f64) -> Result<f64> {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
        acc += w * f(mid + half * x)?;
    }
    Ok(acc * half)
}

impl ArclengthMap {
    fn build(wf: &WarpingFunction) -> Result<Self> {
        let domain = wf.domain();
        let (start, len) = domain.span();
        let h = len / ARCLENGTH_PANELS as f64;
        let knots: Vec<f64> = (0..=ARCLENGTH_PANELS).map(|i| start + h * i as f64).collect();
        let mut cumulative = Vec::with_capacity(knots.len());
        cumulative.push(0.0);
        for w in knots.windows(2) {
            let piece = gauss_legendre(|t| speed(wf, t), w[0], w[1])?;
            cumulative.push(cumulative.last().unwrap() + piece);
        }
        Ok(ArclengthMap { start, len, periodic: domain.is_circle(), knots, cumulative })
    }

    fn period_length(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    fn s_of_t(&self, wf: &WarpingFunction, t: f64) -> Result<f64> {
        let (wraps, local) = if self.periodic {
            let k = ((t - self.start) / self.len).floor();
            (k, t - k * self.len)
        } else {
            (0.0, t)
        };
        let h = self.len / ARCLENGTH_PANELS as f64;
        let i = (((local - self.start) / h).floor().max(0.0) as usize).min(ARCLENGTH_PANELS - 1);
        let partial = gauss_legendre(|x| speed(wf, x), self.knots[i], local)?;
        Ok(wraps * self.period_length() + self.cumulative[i] + partial)
    }

    fn t_of_s(&self, wf: &WarpingFunction, s: f64) -> Result<f64> {
        let total = self.period_length();
        let (wraps, local) = if self.periodic {
            let k = (s / total).floor();
            (k, s - k * total)
        } else {
            (0.0, s)
        };
        let i = match self.cumulative.binary_search_by(|c| c.partial_cmp(&local).unwrap()) {
            Ok(i) => i.min(ARCLENGTH_PANELS - 1),
            Err(i) => i.saturating_sub(1).min(ARCLENGTH_PANELS - 1),
        };
        let (s0, s1) = (self.cumulative[i], self.cumulative[i + 1]);
        let (t0, t1) = (self.knots[i], self.knots[i + 1]);
        let mut t = t0 + (t1 - t0) * (local - s0) / (s1 - s0);
        for _ in 0..50 {
            let g = self.cumulative[i] + gauss_legendre(|x| speed(wf, x), t0, t)? - local;
            let step = g / speed(wf, t)?;
            t -= step;
            if step.abs() <= 1e-15 * (1.0 + t.abs()) {
                break;
            }
        }
        Ok(t + wraps * self.len)
    }
}

#[derive(Debug, Clone)]
enum Profile {
    Graph { warp: WarpingFunction, arclength: ArclengthMap },
    /// Meridian circle `x₁ = -R cos(s/R)`, `r = R sin(s/R)`, `s ∈ (0, πR)`.
    CircleArc { radius: f64 },
}

/// Rotation hypersurface of dimension `n` in `R^{n+1}`.
#[derive(Debug, Clone)]
pub struct RotationHypersurface {
    n: usize,
    profile: Profile,
}

/// Principal curvatures w.r.t. the inward normal `-η`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrincipalCurvatures {
    pub meridian: f64,
    /// Multiplicity `n - 1`.
    pub parallel: f64,
}

impl PrincipalCurvatures {
    /// Normalized mean curvature `(κ_m + (n-1) κ_p) / n`.
    pub fn mean(&self, n: usize) -> f64 {
        (self.meridian + (n - 1) as f64 * self.parallel) / n as f64
    }
}

/// Rotation hypersurface generated by the graph `(t, f(t))`.
pub fn make_rotation_hypersurface(wf: &WarpingFunction, ambient_dim: usize) -> Result<RotationHypersurface> {
    if ambient_dim < 3 {
        return Err(LabError::Precondition(format!("ambient dimension must be at least 3, got {ambient_dim}")));
    }
    let arclength = ArclengthMap::build(wf)?;
    Ok(RotationHypersurface { n: ambient_dim - 1, profile: Profile::Graph { warp: wf.clone(), arclength } })
}

impl RotationHypersurface {
    /// Round sphere of the given radius centred at the origin.
    pub fn sphere(radius: f64, ambient_dim: usize) -> Result<Self> {
        if ambient_dim < 3 || !(radius > 0.0) {
            return Err(LabError::Precondition(format!(
                "need ambient dimension >= 3 and radius > 0, got {ambient_dim}, {radius}"
            )));
        }
        Ok(RotationHypersurface { n: ambient_dim - 1, profile: Profile::CircleArc { radius } })
    }

    /// Hypersurface dimension `n`.
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn ambient_dim(&self) -> usize {
        self.n + 1
    }

    pub fn warp(&self) -> Option<&WarpingFunction> {
        match &self.profile {
            Profile::Graph { warp, .. } => Some(warp),
            Profile::CircleArc { .. } => None,
        }
    }

    /// Arclength of the parallel at level `x₁ = t`.
    pub fn s_at_level(&self, t: f64) -> Result<f64> {
        match &self.profile {
            Profile::Graph { warp, arclength } => arclength.s_of_t(warp, t),
            Profile::CircleArc { radius } => {
                if t.abs() >= *radius {
                    return Err(LabError::DomainError { t, a: -radius, b: *radius });
                }
                Ok(radius * (-t / radius).acos())
            }
        }
    }

    /// Level `x₁` reached at arclength `s`.
    pub fn level_at(&self, s: f64) -> Result<f64> {
        Ok(self.profile_jet(s)?.x1)
    }

    pub fn profile_jet(&self, s: f64) -> Result<ProfileJet> {
        match &self.profile {
            Profile::Graph { warp, arclength } => {
                let t = arclength.t_of_s(warp, s)?;
                let j = warp.jet(t)?;
                let w = 1.0 + j.d1 * j.d1;
                let dx1 = 1.0 / w.sqrt();
                Ok(ProfileJet {
                    x1: t,
                    dx1,
                    d2x1: -j.d1 * j.d2 / (w * w),
                    r: j.v,
                    dr: j.d1 * dx1,
                    d2r: j.d2 / (w * w),
                })
            }
            Profile::CircleArc { radius } => {
                let a = s / radius;
                if !(a > 0.0 && a < std::f64::consts::PI) {
                    return Err(LabError::DomainError { t: s, a: 0.0, b: std::f64::consts::PI * radius });
                }
                Ok(ProfileJet {
                    x1: -radius * a.cos(),
                    dx1: a.sin(),
                    d2x1: a.cos() / radius,
                    r: radius * a.sin(),
                    dr: a.cos(),
                    d2r: -a.sin() / radius,
                })
            }
        }
    }

    /// `φ(s, Φ)` with `Φ` a unit vector of `R^n`.
    pub fn embed(&self, s: f64, phi: &[f64]) -> Result<Vec<f64>> {
        self.check_direction(phi)?;
        let p = self.profile_jet(s)?;
        let mut x = Vec::with_capacity(self.n + 1);
        x.push(p.x1);
        x.extend(phi.iter().map(|c| p.r * c));
        Ok(x)
    }

    /// Unit normal `η = (-r', x₁' Φ)`.
    pub fn normal(&self, s: f64, phi: &[f64]) -> Result<Vec<f64>> {
        self.check_direction(phi)?;
        let p = self.profile_jet(s)?;
        let mut x = Vec::with_capacity(self.n + 1);
        x.push(-p.dr);
        x.extend(phi.iter().map(|c| p.dx1 * c));
        Ok(x)
    }

    /// Closed-form principal curvatures (inward normal convention).
    pub fn principal_curvatures(&self, s: f64) -> Result<PrincipalCurvatures> {
        let p = self.profile_jet(s)?;
        Ok(PrincipalCurvatures { meridian: p.d2x1 * p.dr - p.dx1 * p.d2r, parallel: p.dx1 / p.r })
    }

    /// Principal curvatures from central differences of the embedding with step `h`.
    pub fn principal_curvatures_fd(&self, s: f64, phi: &[f64], tangent: &[f64], h: f64) -> Result<PrincipalCurvatures> {
        self.check_direction(phi)?;
        let at = |ds: f64, dtheta: f64| -> Result<Vec<f64>> {
            let dir: Vec<f64> = phi.iter().zip(tangent).map(|(p, e)| dtheta.cos() * p + dtheta.sin() * e).collect();
            self.embed(s + ds, &dir)
        };
        let c = at(0.0, 0.0)?;
        let (sp, sm) = (at(h, 0.0)?, at(-h, 0.0)?);
        let (ap, am) = (at(0.0, h)?, at(0.0, -h)?);
        let ds: Vec<f64> = sp.iter().zip(&sm).map(|(a, b)| (a - b) / (2.0 * h)).collect();
        let dss: Vec<f64> = (0..c.len()).map(|i| (sp[i] - 2.0 * c[i] + sm[i]) / (h * h)).collect();
        let da: Vec<f64> = ap.iter().zip(&am).map(|(a, b)| (a - b) / (2.0 * h)).collect();
        let daa: Vec<f64> = (0..c.len()).map(|i| (ap[i] - 2.0 * c[i] + am[i]) / (h * h)).collect();
        let nu = inward_normal_from_meridian_tangent(&ds, phi);
        Ok(PrincipalCurvatures { meridian: dot(&dss, &nu) / dot(&ds, &ds), parallel: dot(&daa, &nu) / dot(&da, &da) })
    }

    pub(crate) fn check_direction(&self, phi: &[f64]) -> Result<()> {
        if phi.len() != self.n {
            return Err(LabError::Precondition(format!("direction must lie in R^{}, got length {}", self.n, phi.len())));
        }
        let norm = dot(phi, phi).sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(LabError::Precondition(format!("direction must be a unit vector, |Φ| = {norm}")));
        }
        Ok(())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Rotate a meridian tangent `(a, bΦ)` to the inward normal `(b, -aΦ)/|·|`.
pub(crate) fn inward_normal_from_meridian_tangent(tangent: &[f64], phi: &[f64]) -> Vec<f64> {
    let a = tangent[0];
    let b = dot(&tangent[1..], phi);
    let len = (a * a + b * b).sqrt();
    let mut nu = Vec::with_capacity(tangent.len());
    nu.push(b / len);
    nu.extend(phi.iter().map(|c| -a * c / len));
    nu
}

/// Interval domain helper for callers building profiles over a window.
pub fn graph_window(wf: &WarpingFunction, a: f64, b: f64) -> Result<WarpingFunction> {
    wf.with_domain(Domain1D::interval(a, b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::warp::catalog;

    fn e(n: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v
    }

    #[test]
    fn cylinder_curvatures() {
        let m = make_rotation_hypersurface(&catalog::constant(1.0).unwrap(), 3).unwrap();
        let k = m.principal_curvatures(0.8).unwrap();
        assert_eq!((k.meridian, k.parallel), (0.0, 1.0));
        let fd = m.principal_curvatures_fd(0.8, &e(2, 0), &e(2, 1), 1e-3).unwrap();
        assert!(fd.meridian.abs() < 1e-6 && (fd.parallel - 1.0).abs() < 1e-6);
    }

    #[test]
    fn sphere_curvatures() {
        let m = RotationHypersurface::sphere(1.0, 3).unwrap();
        let k = m.principal_curvatures(1.1).unwrap();
        assert!((k.meridian - 1.0).abs() < 1e-15 && (k.parallel - 1.0).abs() < 1e-15);
    }

    #[test]
    fn catenoid_is_minimal() {
        let m = make_rotation_hypersurface(&catalog::cosh(2.0).unwrap(), 3).unwrap();
        for t in [-1.2, 0.0, 0.4, 1.5] {
            let s = m.s_at_level(t).unwrap();
            let fd = m.principal_curvatures_fd(s, &e(2, 0), &e(2, 1), 1e-3).unwrap();
            assert!(fd.mean(2).abs() < 1e-5, "t = {t}: H = {}", fd.mean(2));
            assert!(m.principal_curvatures(s).unwrap().mean(2).abs() < 1e-12);
        }
    }

    #[test]
    fn arclength_round_trip_and_unit_speed() {
        let m = make_rotation_hypersurface(&catalog::two_plus_cos().unwrap(), 3).unwrap();
        for t in [-0.7, 0.0, 1.3, 5.9, 8.0] {
            let s = m.s_at_level(t).unwrap();
            assert!((m.level_at(s).unwrap() - t).abs() < 1e-12, "t = {t}");
            let p = m.profile_jet(s).unwrap();
            assert!((p.dx1.hypot(p.dr) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn normal_is_orthogonal_to_tangents() {
        let m = make_rotation_hypersurface(&catalog::two_plus_cos().unwrap(), 4).unwrap();
        let phi = [0.6, 0.0, 0.8];
        let s = 2.0;
        let h = 1e-5;
        let eta = m.normal(s, &phi).unwrap();
        let a = m.embed(s + h, &phi).unwrap();
        let b = m.embed(s - h, &phi).unwrap();
        let ds: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (x - y) / (2.0 * h)).collect();
        assert!(dot(&eta, &ds).abs() < 1e-9);
        let rot = |a: f64| [phi[0] * a.cos(), a.sin(), phi[2] * a.cos()];
        let c = m.embed(s, &rot(h)).unwrap();
        let o = m.embed(s, &rot(-h)).unwrap();
        let dth: Vec<f64> = c.iter().zip(&o).map(|(x, y)| (x - y) / (2.0 * h)).collect();
        assert!(dot(&eta, &dth).abs() < 1e-9);
    }
}
