//! Intersections `Σ = M ∩ N` of a rotation hypersurface `M` with a hyperplane
//! or an on-axis sphere `N`, and the splitting of the mean curvature of `Σ`.
//!
//! Frames live in the plane spanned by `e₁` and `Φ`. With `η* = ∂s` the unit
//! normal of `Σ` in `M` and `ξ*` the unit normal of `Σ` in `N`, both pairs
//! `(η*, η)` and `(ξ*, ξ)` are positively oriented in that plane.

use serde::{Deserialize, Serialize};

use super::rotation::{dot, inward_normal_from_meridian_tangent, RotationHypersurface};
use crate::error::{LabError, Result};

/// Default finite-difference step for the decomposition check.
pub const DEFAULT_FD_STEP: f64 = 1e-4;
/// `sin φ` below this is treated as tangency.
pub const TANGENCY_TOL: f64 = 1e-12;
/// Threshold for the normality and totally-geodesic verdicts.
pub const NORMALITY_TOL: f64 = 1e-8;

/// The second hypersurface `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Section {
    /// `{x₁ = t₀}` with `ξ = e₁`.
    Hyperplane,
    /// Sphere centred at `c e₁` through the parallel at level `t₀`, `ξ` outward.
    Sphere { center: f64 },
}

/// Which sign of the scalar corollary matched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorollarySign {
    Plus,
    Minus,
    /// Both match, which happens when `H_N = 0`.
    Both,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectionReport {
    pub t0: f64,
    pub s0: f64,
    pub angle: f64,
    pub cos_angle: f64,
    /// Mean curvature vector of `Σ` in `M`, from the intrinsic profile.
    pub mean_curv_sigma_in_m: Vec<f64>,
    /// `(H_Σ^N)^⊤ + (H_N)^⊤`, projected onto `TM`.
    pub projected_sum: Vec<f64>,
    pub decomposition_residual: f64,
    /// `⟨H_Σ^M, η*⟩`
    pub scalar_sigma_in_m: f64,
    /// `⟨H_Σ^N, ξ*⟩`
    pub scalar_sigma_in_n: f64,
    /// `⟨H_N, ξ⟩`
    pub scalar_n: f64,
    pub plus_residual: f64,
    pub minus_residual: f64,
    pub matched_sign: CorollarySign,
    pub normal_verdict: bool,
    pub slice_second_form_norm: f64,
    pub step: f64,
}

/// Second fundamental form of the slice through level `t₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceGeodesity {
    /// `|f'/f| sqrt(n-1)` in the warped metric `dt² + f² g`.
    pub norm: f64,
    /// Same quantity from central differences of `f²`.
    pub norm_fd: f64,
    /// `|r'/r| sqrt(n-1)` in the induced arclength metric `ds² + r² g`.
    pub induced_norm: f64,
    pub verdict: bool,
}

fn axis_direction(n: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut phi = vec![0.0; n];
    phi[0] = 1.0;
    let tangents = (1..n)
        .map(|k| {
            let mut e = vec![0.0; n];
            e[k] = 1.0;
            e
        })
        .collect();
    (phi, tangents)
}

fn section_normal(section: Section, point: &[f64]) -> (Vec<f64>, f64) {
    match section {
        Section::Hyperplane => {
            let mut xi = vec![0.0; point.len()];
            xi[0] = 1.0;
            (xi, 0.0)
        }
        Section::Sphere { center } => {
            let mut d = point.to_vec();
            d[0] -= center;
            let radius = dot(&d, &d).sqrt();
            (d.iter().map(|x| x / radius).collect(), radius)
        }
    }
}

/// Angle between `η` and `ξ` along the parallel at level `t₀`.
pub fn section_angle(m: &RotationHypersurface, section: Section, t0: f64) -> Result<f64> {
    let s0 = m.s_at_level(t0)?;
    let (phi, _) = axis_direction(m.dim());
    let eta = m.normal(s0, &phi)?;
    let p = m.embed(s0, &phi)?;
    let (xi, _) = section_normal(section, &p);
    let c = dot(&eta, &xi).clamp(-1.0, 1.0);
    let sin = (1.0 - c * c).sqrt();
    if sin <= TANGENCY_TOL {
        return Err(LabError::TangencyError { sin_phi: sin });
    }
    Ok(c.acos())
}

/// Angle between `M` and the hyperplane `{x₁ = t₀}`.
pub fn intersection_angle(m: &RotationHypersurface, t0: f64) -> Result<f64> {
    section_angle(m, Section::Hyperplane, t0)
}

/// Slice second fundamental form norm at level `t₀`.
pub fn slice_geodesity(m: &RotationHypersurface, t0: f64) -> Result<SliceGeodesity> {
    let s0 = m.s_at_level(t0)?;
    let p = m.profile_jet(s0)?;
    let mult = ((m.dim() - 1) as f64).sqrt();
    // graph view f(t) = r(s(t)) has f'/f = r' / (x₁' r)
    let norm = (p.dr / (p.dx1 * p.r)).abs() * mult;
    let h = 1e-4;
    let f_at = |t: f64| -> Result<f64> { Ok(m.profile_jet(m.s_at_level(t)?)?.r) };
    let (fp, fm) = (f_at(t0 + h)?, f_at(t0 - h)?);
    let dsq = (fp * fp - fm * fm) / (2.0 * h);
    let norm_fd = (dsq / (2.0 * p.r * p.r)).abs() * mult;
    Ok(SliceGeodesity { norm, norm_fd, induced_norm: (p.dr / p.r).abs() * mult, verdict: norm <= NORMALITY_TOL })
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn scale(a: &[f64], c: f64) -> Vec<f64> {
    a.iter().map(|x| x * c).collect()
}

fn project_out(v: &[f64], unit: &[f64]) -> Vec<f64> {
    let c = dot(v, unit);
    v.iter().zip(unit).map(|(x, u)| x - c * u).collect()
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Rotate a vector `(a e₁ + b Φ)` by `-90°` in the `(e₁, Φ)` plane.
fn rotate_back(v: &[f64], phi: &[f64]) -> Vec<f64> {
    let a = v[0];
    let b = dot(&v[1..], phi);
    let mut w = Vec::with_capacity(v.len());
    w.push(b);
    w.extend(phi.iter().map(|c| -a * c));
    w
}

/// Both sides of the mean-curvature decomposition of `Σ = M ∩ N` at level
/// `t₀`, each built from finite differences of its own embedding.
/// `flip_normal` reverses `η` (and with it `η*`).
pub fn decomposition_check(
    m: &RotationHypersurface,
    section: Section,
    t0: f64,
    step: f64,
    flip_normal: bool,
) -> Result<IntersectionReport> {
    if !(step > 0.0) {
        return Err(LabError::Precondition(format!("finite-difference step must be positive, got {step}")));
    }
    let angle_hint = section_angle(m, section, t0)?;
    let s0 = m.s_at_level(t0)?;
    let (phi, tangents) = axis_direction(m.dim());
    let sign = if flip_normal { -1.0 } else { 1.0 };
    let h = step;

    // intrinsic side: Σ is the parallel of ds² + r² g, with H = -(r'/r) ∂s
    let p0 = m.embed(s0, &phi)?;
    let (pp, pm) = (m.embed(s0 + h, &phi)?, m.embed(s0 - h, &phi)?);
    let ds = scale(&sub(&pp, &pm), 0.5 / h);
    let r0 = m.profile_jet(s0)?.r;
    let dr = (m.profile_jet(s0 + h)?.r - m.profile_jet(s0 - h)?.r) / (2.0 * h);
    let lhs = scale(&ds, -dr / r0);

    // extrinsic side: mean curvature of Σ in R^{n+1} from its own parametrization
    let k = tangents.len() as f64;
    let mut h_sigma_r = vec![0.0; p0.len()];
    for e in &tangents {
        let at = |a: f64| -> Result<Vec<f64>> {
            let dir: Vec<f64> = phi.iter().zip(e).map(|(p, t)| a.cos() * p + a.sin() * t).collect();
            m.embed(s0, &dir)
        };
        let (cp, cm) = (at(h)?, at(-h)?);
        let vel = scale(&sub(&cp, &cm), 0.5 / h);
        let acc: Vec<f64> = (0..p0.len()).map(|i| (cp[i] - 2.0 * p0[i] + cm[i]) / (h * h)).collect();
        let speed2 = dot(&vel, &vel);
        for (acc_i, a) in h_sigma_r.iter_mut().zip(&acc) {
            *acc_i += a / (speed2 * k);
        }
    }
    let (xi, sphere_radius) = section_normal(section, &p0);
    let h_sigma_n = project_out(&h_sigma_r, &xi);
    let h_n: Vec<f64> = match section {
        Section::Hyperplane => vec![0.0; p0.len()],
        Section::Sphere { .. } => scale(&xi, -1.0 / sphere_radius),
    };
    let nu_in = inward_normal_from_meridian_tangent(&ds, &phi);
    let eta = scale(&nu_in, -sign);
    let sum: Vec<f64> = h_sigma_n.iter().zip(&h_n).map(|(a, b)| a + b).collect();
    let rhs = project_out(&sum, &eta);
    let residual = norm(&sub(&lhs, &rhs));

    // scalar form
    let eta_star = scale(&ds, sign / norm(&ds));
    let xi_star = rotate_back(&xi, &phi);
    let cos_angle = dot(&eta, &xi);
    let sin_angle = (1.0 - cos_angle * cos_angle).max(0.0).sqrt();
    let scalar_m = dot(&lhs, &eta_star);
    let scalar_sn = dot(&h_sigma_n, &xi_star);
    let scalar_n = dot(&h_n, &xi);
    let plus = (scalar_m - (scalar_sn * cos_angle + scalar_n * sin_angle)).abs();
    let minus = (scalar_m - (scalar_sn * cos_angle - scalar_n * sin_angle)).abs();
    let tol = corollary_tolerance(h, scalar_m.abs().max(scalar_sn.abs()).max(scalar_n.abs()));
    let matched_sign = match (plus <= tol, minus <= tol) {
        (true, true) => CorollarySign::Both,
        (true, false) => CorollarySign::Plus,
        (false, true) => CorollarySign::Minus,
        (false, false) => CorollarySign::Neither,
    };
    let slice = slice_geodesity(m, t0)?;
    Ok(IntersectionReport {
        t0,
        s0,
        angle: if flip_normal { std::f64::consts::PI - angle_hint } else { angle_hint },
        cos_angle,
        mean_curv_sigma_in_m: lhs,
        projected_sum: rhs,
        decomposition_residual: residual,
        scalar_sigma_in_m: scalar_m,
        scalar_sigma_in_n: scalar_sn,
        scalar_n,
        plus_residual: plus,
        minus_residual: minus,
        matched_sign,
        normal_verdict: cos_angle.abs() <= NORMALITY_TOL,
        slice_second_form_norm: slice.norm,
        step,
    })
}

/// Acceptance threshold for the scalar corollary at finite-difference step `h`.
pub fn corollary_tolerance(h: f64, magnitude: f64) -> f64 {
    (100.0 * h * h + 1e-7) * (1.0 + magnitude)
}
