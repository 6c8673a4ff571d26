//! Rotationally symmetric surfaces `dρ² + G(ρ)² dθ²` over `[a, b] × S¹`,
//! harmonic extensions of boundary data, and the integral identity relating
//! interior Hessian and curvature terms of `u` to boundary terms.
//!
//! The grid is a tensor product in `(ρ, θ)` with finite-volume conductances.
//! When `G(a) = 0` the inner ring collapses to a single pole node.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::solvers::{conjugate_gradient, CgStats};
use super::sparse::{CsrMatrix, TripletBuilder};
use crate::error::{LabError, Result};
use crate::quadrature::pairwise_sum;
use crate::warp::WarpingFunction;

/// Relative residual of the Dirichlet solve.
pub const DIRICHLET_TOL: f64 = 1e-12;
const GL_NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
const GL_WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];

/// Radial profile `G` of the surface.
#[derive(Debug, Clone)]
pub enum RotationalProfile {
    /// Flat disc `G = ρ` on `[0, R]`.
    Disc { radius: f64 },
    /// Flat cylinder `G = c` on `[0, ℓ]`.
    Cylinder { length: f64, radius: f64 },
    /// `G = f(ρ)` on `[a, b]` for a positive warping function.
    Warped { warp: WarpingFunction, a: f64, b: f64 },
}

impl RotationalProfile {
    pub fn range(&self) -> (f64, f64) {
        match self {
            RotationalProfile::Disc { radius } => (0.0, *radius),
            RotationalProfile::Cylinder { length, .. } => (0.0, *length),
            RotationalProfile::Warped { a, b, .. } => (*a, *b),
        }
    }

    /// `(G, G', G'')`
    pub fn jet(&self, rho: f64) -> Result<(f64, f64, f64)> {
        match self {
            RotationalProfile::Disc { .. } => Ok((rho, 1.0, 0.0)),
            RotationalProfile::Cylinder { radius, .. } => Ok((*radius, 0.0, 0.0)),
            RotationalProfile::Warped { warp, .. } => warp.eval(rho),
        }
    }

    pub fn has_pole(&self) -> bool {
        matches!(self, RotationalProfile::Disc { .. })
    }

    fn validate(&self) -> Result<()> {
        let (a, b) = self.range();
        if !(a < b) {
            return Err(LabError::InvalidDomain(format!("radial range must satisfy a < b, got [{a}, {b}]")));
        }
        match self {
            RotationalProfile::Disc { radius } if !(*radius > 0.0) => {
                Err(LabError::Precondition(format!("disc radius must be positive, got {radius}")))
            }
            RotationalProfile::Cylinder { radius, .. } if !(*radius > 0.0) => {
                Err(LabError::Precondition(format!("cylinder radius must be positive, got {radius}")))
            }
            _ => Ok(()),
        }
    }
}

/// Boundary data `f₀(θ) = offset + amplitude·cos(kθ)`. On the unit circle
/// `cos(kθ)` has eigenvalue `k²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryMode {
    pub k: u32,
    pub amplitude: f64,
    #[serde(default)]
    pub offset: f64,
}

impl BoundaryMode {
    pub fn cosine(k: u32) -> Self {
        BoundaryMode { k, amplitude: 1.0, offset: 0.0 }
    }

    pub fn constant(c: f64) -> Self {
        BoundaryMode { k: 0, amplitude: 0.0, offset: c }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.offset + self.amplitude * (self.k as f64 * theta).cos()
    }

    /// `(f₀', f₀'')` in `θ`.
    pub fn derivatives(&self, theta: f64) -> (f64, f64) {
        let k = self.k as f64;
        (-self.amplitude * k * (k * theta).sin(), -self.amplitude * k * k * (k * theta).cos())
    }

    /// Eigenvalue of `cos(kθ)` on the unit circle.
    pub fn fiber_eigenvalue(&self) -> f64 {
        (self.k as f64).powi(2)
    }
}

/// Tensor grid on a rotational surface.
#[derive(Debug, Clone)]
pub struct RotationalDomain {
    pub profile: RotationalProfile,
    pub radial: usize,
    pub angular: usize,
}

fn gauss3<F: Fn(f64) -> Result<f64>>(f: F, a: f64, b: f64) -> Result<f64> {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut acc = 0.0;
    for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
        acc += w * f(mid + half * x)?;
    }
    Ok(acc * half)
}

impl RotationalDomain {
    /// `radial` intervals in `ρ`, `angular` nodes in `θ`.
    pub fn new(profile: RotationalProfile, radial: usize, angular: usize) -> Result<Self> {
        profile.validate()?;
        if radial < 4 || angular < 8 {
            return Err(LabError::Precondition(format!(
                "rotational grid needs at least 4 radial intervals and 8 angular nodes, got {radial}x{angular}"
            )));
        }
        let d = RotationalDomain { profile, radial, angular };
        for i in 0..=radial {
            let (g, _, _) = d.profile.jet(d.rho(i))?;
            if !(g > 0.0) && !(i == 0 && d.profile.has_pole()) {
                return Err(LabError::NonPositiveWarp { t: d.rho(i), value: g });
            }
        }
        Ok(d)
    }

    pub fn disc(radius: f64, n: usize) -> Result<Self> {
        Self::new(RotationalProfile::Disc { radius }, n, n)
    }

    pub fn h_rho(&self) -> f64 {
        let (a, b) = self.profile.range();
        (b - a) / self.radial as f64
    }

    pub fn h_theta(&self) -> f64 {
        2.0 * PI / self.angular as f64
    }

    pub fn rho(&self, i: usize) -> f64 {
        let (a, _) = self.profile.range();
        a + self.h_rho() * i as f64
    }

    pub fn theta(&self, j: usize) -> f64 {
        self.h_theta() * j as f64
    }

    fn first_ring(&self) -> usize {
        usize::from(self.profile.has_pole())
    }

    pub fn node_count(&self) -> usize {
        if self.profile.has_pole() {
            1 + self.radial * self.angular
        } else {
            (self.radial + 1) * self.angular
        }
    }

    /// Node at ring `i`, angle index `j` (any `j` at the pole).
    pub fn index(&self, i: usize, j: usize) -> usize {
        let j = j % self.angular;
        if self.profile.has_pole() {
            if i == 0 {
                0
            } else {
                1 + (i - 1) * self.angular + j
            }
        } else {
            i * self.angular + j
        }
    }

    /// Whether a node lies on `∂Ω`.
    pub fn is_boundary(&self, node: usize) -> bool {
        let ring = if self.profile.has_pole() {
            if node == 0 {
                return false;
            }
            1 + (node - 1) / self.angular
        } else {
            node / self.angular
        };
        ring == self.radial || (!self.profile.has_pole() && ring == 0)
    }

    /// Stiffness matrix and lumped cell areas of `-Δ`.
    pub fn assemble(&self) -> Result<(CsrMatrix, Vec<f64>)> {
        let (hr, ht) = (self.h_rho(), self.h_theta());
        let n = self.node_count();
        let mut b = TripletBuilder::new(n);
        let mut w = vec![0.0; n];
        let g = |r: f64| -> Result<f64> { Ok(self.profile.jet(r)?.0) };
        let first = self.first_ring();
        if self.profile.has_pole() {
            let c = g(self.rho(0) + 0.5 * hr)? * ht / hr;
            for j in 0..self.angular {
                b.add_edge(0, self.index(1, j), c);
            }
            w[0] = 2.0 * PI * gauss3(g, self.rho(0), self.rho(0) + 0.5 * hr)?;
        }
        for i in first..=self.radial {
            let lo = if i == 0 { self.rho(0) } else { self.rho(i) - 0.5 * hr };
            let hi = if i == self.radial { self.rho(i) } else { self.rho(i) + 0.5 * hr };
            let area = ht * gauss3(g, lo, hi)?;
            let angular_c = (hi - lo) / (g(self.rho(i))? * ht);
            let radial_c = if i < self.radial { g(self.rho(i) + 0.5 * hr)? * ht / hr } else { 0.0 };
            for j in 0..self.angular {
                let k = self.index(i, j);
                w[k] = area;
                b.add_edge(k, self.index(i, j + 1), angular_c);
                if i < self.radial {
                    b.add_edge(k, self.index(i + 1, j), radial_c);
                }
            }
        }
        Ok((b.build(), w))
    }
}

/// Dirichlet problem `Δu = 0` in `Ω`, `u = f₀` on every boundary ring.
#[derive(Debug, Clone)]
pub struct DirichletProblem {
    pub domain: RotationalDomain,
    pub data: BoundaryMode,
}

#[derive(Debug, Clone)]
pub struct DirichletSolution {
    pub problem: DirichletProblem,
    pub u: Vec<f64>,
    pub stiffness: CsrMatrix,
    pub weights: Vec<f64>,
    pub cg: CgStats,
    /// `‖(K u)_I‖ / ‖(K u_B)_I‖` over interior nodes.
    pub interior_residual: f64,
    pub max_principle: bool,
}

/// Harmonic extension of the boundary data by conjugate gradients.
pub fn harmonic_extension(problem: &DirichletProblem) -> Result<DirichletSolution> {
    let d = &problem.domain;
    let (k, w) = d.assemble()?;
    let n = d.node_count();
    let boundary: Vec<bool> = (0..n).map(|i| d.is_boundary(i)).collect();
    let mut ub = vec![0.0; n];
    for i in 0..=d.radial {
        for j in 0..d.angular {
            let idx = d.index(i, j);
            if boundary[idx] {
                ub[idx] = problem.data.eval(d.theta(j));
            }
        }
    }
    let kub = k.mul(&ub);
    let rhs: Vec<f64> = kub.iter().zip(&boundary).map(|(v, b)| if *b { 0.0 } else { -v }).collect();
    let apply = |x: &[f64], out: &mut [f64]| {
        k.matvec(x, out);
        for (o, b) in out.iter_mut().zip(&boundary) {
            if *b {
                *o = 0.0;
            }
        }
    };
    let diag: Vec<f64> = k.diagonal().iter().zip(&boundary).map(|(d, b)| if *b { 1.0 } else { *d }).collect();
    let mut x = vec![0.0; n];
    let cg = if rhs.iter().all(|v| *v == 0.0) {
        CgStats { iterations: 0, relative_residual: 0.0 }
    } else {
        conjugate_gradient(&apply, &diag, &rhs, &mut x, None, DIRICHLET_TOL, 20 * n + 100)?
    };
    let u: Vec<f64> = x.iter().zip(&ub).zip(&boundary).map(|((xi, bi), is_b)| if *is_b { *bi } else { *xi }).collect();
    let ku = k.mul(&u);
    let interior: Vec<f64> = ku.iter().zip(&boundary).filter(|(_, b)| !**b).map(|(v, _)| v * v).collect();
    let scale = pairwise_sum(&rhs.iter().map(|v| v * v).collect::<Vec<_>>()).sqrt();
    let interior_residual = if scale == 0.0 { pairwise_sum(&interior).sqrt() } else { pairwise_sum(&interior).sqrt() / scale };
    let (lo, hi) = (0..n).filter(|i| boundary[*i]).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
        (lo.min(u[i]), hi.max(u[i]))
    });
    let slack = 1e-12 * (1.0 + hi.abs().max(lo.abs()));
    let max_principle = u.iter().all(|v| *v >= lo - slack && *v <= hi + slack);
    Ok(DirichletSolution { problem: problem.clone(), u, stiffness: k, weights: w, cg, interior_residual, max_principle })
}

/// Nodal derivatives of `u` in `(ρ, θ)`.
#[derive(Debug, Clone, Copy, Default)]
struct Derivs {
    r: f64,
    rr: f64,
    t: f64,
    tt: f64,
    rt: f64,
}

impl DirichletSolution {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.u[self.problem.domain.index(i, j)]
    }

    fn d_rho(&self, i: usize, j: usize) -> f64 {
        let d = &self.problem.domain;
        let h = d.h_rho();
        let n = d.radial;
        let ring = |i: usize| self.at(i, j);
        if i == n {
            (3.0 * ring(n) - 4.0 * ring(n - 1) + ring(n - 2)) / (2.0 * h)
        } else if i == 0 {
            (-3.0 * ring(0) + 4.0 * ring(1) - ring(2)) / (2.0 * h)
        } else {
            (ring(i + 1) - ring(i - 1)) / (2.0 * h)
        }
    }

    fn derivs(&self, i: usize, j: usize) -> Derivs {
        let d = &self.problem.domain;
        let (h, ht) = (d.h_rho(), d.h_theta());
        let n = d.radial;
        let ring = |i: usize| self.at(i, j);
        let rr = if i == n {
            (2.0 * ring(n) - 5.0 * ring(n - 1) + 4.0 * ring(n - 2) - ring(n - 3)) / (h * h)
        } else if i == 0 {
            (2.0 * ring(0) - 5.0 * ring(1) + 4.0 * ring(2) - ring(3)) / (h * h)
        } else {
            (ring(i + 1) - 2.0 * ring(i) + ring(i - 1)) / (h * h)
        };
        let jm = (j + d.angular - 1) % d.angular;
        let (up, um) = (self.at(i, j + 1), self.at(i, jm));
        Derivs {
            r: self.d_rho(i, j),
            rr,
            t: (up - um) / (2.0 * ht),
            tt: (up - 2.0 * ring(i) + um) / (ht * ht),
            rt: (self.d_rho(i, j + 1) - self.d_rho(i, jm)) / (2.0 * ht),
        }
    }
}

/// All terms of the integral identity
/// `∫(Δu)² - ∫|∇²u|² - ∫Ric(∇u,∇u) = Σ_∂ ∫ (H u_ν² + 2 u_ν Δ_∂u + II(∇_∂u, ∇_∂u))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReillyLedger {
    pub volume_laplacian_sq: f64,
    pub volume_hessian_sq: f64,
    pub volume_ricci: f64,
    pub boundary_mean_curvature: f64,
    pub boundary_laplacian: f64,
    pub boundary_second_form: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub relative_residual: f64,
    /// Minimum principal curvature of the outer boundary circle.
    pub kappa: f64,
    pub outer_mean_curvature: f64,
    pub nonpositive_mean_curvature: bool,
    pub radial: usize,
    pub angular: usize,
}

/// Pointwise values on one boundary ring.
#[derive(Debug, Clone)]
struct BoundaryRing {
    /// Mean curvature w.r.t. the outward normal.
    h: f64,
    /// Circle radius `G` on that ring.
    g: f64,
    u: Vec<f64>,
    u_nu: Vec<f64>,
    lap_boundary: Vec<f64>,
    grad_boundary_sq: Vec<f64>,
}

impl DirichletSolution {
    fn boundary_ring(&self, outer: bool) -> Result<BoundaryRing> {
        let d = &self.problem.domain;
        let i = if outer { d.radial } else { 0 };
        let (g, g1, _) = d.profile.jet(d.rho(i))?;
        let sign = if outer { 1.0 } else { -1.0 };
        let mut ring = BoundaryRing {
            h: sign * g1 / g,
            g,
            u: Vec::with_capacity(d.angular),
            u_nu: Vec::with_capacity(d.angular),
            lap_boundary: Vec::with_capacity(d.angular),
            grad_boundary_sq: Vec::with_capacity(d.angular),
        };
        for j in 0..d.angular {
            // u = f₀ on the ring, so tangential derivatives are those of the data
            let (dt, dtt) = self.problem.data.derivatives(d.theta(j));
            ring.u.push(self.at(i, j));
            ring.u_nu.push(sign * self.d_rho(i, j));
            ring.lap_boundary.push(dtt / (g * g));
            ring.grad_boundary_sq.push(dt * dt / (g * g));
        }
        Ok(ring)
    }

    fn boundary_rings(&self) -> Result<Vec<BoundaryRing>> {
        let mut rings = vec![self.boundary_ring(true)?];
        if !self.problem.domain.profile.has_pole() {
            rings.push(self.boundary_ring(false)?);
        }
        Ok(rings)
    }

    fn ring_integral(&self, ring: &BoundaryRing, density: impl Fn(usize) -> f64) -> f64 {
        let ht = self.problem.domain.h_theta();
        pairwise_sum(&(0..ring.u.len()).map(|j| density(j) * ring.g * ht).collect::<Vec<_>>())
    }

    /// `(∫(Δu)², ∫|∇²u|², ∫Ric(∇u,∇u), ∫|∇u|²)` by finite differences on the grid.
    fn volume_terms(&self) -> Result<[f64; 4]> {
        let d = &self.problem.domain;
        let first = usize::from(d.profile.has_pole());
        let mut terms: [Vec<f64>; 4] = Default::default();
        let mut ring1 = [0.0; 4];
        for i in first..=d.radial {
            let (g, g1, g2) = d.profile.jet(d.rho(i))?;
            for j in 0..d.angular {
                let v = self.derivs(i, j);
                let lap = v.rr + (g1 / g) * v.r + v.tt / (g * g);
                let h_rr = v.rr;
                let h_rt = v.rt - (g1 / g) * v.t;
                let h_tt = v.tt + g * g1 * v.r;
                let hess = h_rr * h_rr + 2.0 * h_rt * h_rt / (g * g) + h_tt * h_tt / g.powi(4);
                let grad = v.r * v.r + v.t * v.t / (g * g);
                let ric = -(g2 / g) * grad;
                let w = self.weights[d.index(i, j)];
                let vals = [lap * lap, hess, ric, grad];
                for (t, v) in terms.iter_mut().zip(vals) {
                    t.push(w * v);
                }
                if i == 1 && first == 1 {
                    for (a, v) in ring1.iter_mut().zip(vals) {
                        *a += v / d.angular as f64;
                    }
                }
            }
        }
        if first == 1 {
            // polar coordinates are singular at the pole; use the first-ring average
            for (t, v) in terms.iter_mut().zip(ring1) {
                t.push(self.weights[0] * v);
            }
        }
        Ok([pairwise_sum(&terms[0]), pairwise_sum(&terms[1]), pairwise_sum(&terms[2]), pairwise_sum(&terms[3])])
    }
}

/// Every term of the identity for the harmonic extension `sol`.
pub fn reilly_ledger(sol: &DirichletSolution) -> Result<ReillyLedger> {
    let [lap2, hess2, ric, _] = sol.volume_terms()?;
    let rings = sol.boundary_rings()?;
    let (mut bh, mut bl, mut bii) = (0.0, 0.0, 0.0);
    for r in &rings {
        bh += sol.ring_integral(r, |j| r.h * r.u_nu[j] * r.u_nu[j]);
        bl += sol.ring_integral(r, |j| 2.0 * r.u_nu[j] * r.lap_boundary[j]);
        bii += sol.ring_integral(r, |j| r.h * r.grad_boundary_sq[j]);
    }
    let lhs = lap2 - hess2 - ric;
    let rhs = bh + bl + bii;
    let residual = (lhs - rhs).abs();
    let d = &sol.problem.domain;
    Ok(ReillyLedger {
        volume_laplacian_sq: lap2,
        volume_hessian_sq: hess2,
        volume_ricci: ric,
        boundary_mean_curvature: bh,
        boundary_laplacian: bl,
        boundary_second_form: bii,
        lhs,
        rhs,
        residual,
        relative_residual: residual / lhs.abs().max(rhs.abs()).max(1.0),
        kappa: rings[0].h,
        outer_mean_curvature: rings[0].h,
        nonpositive_mean_curvature: rings[0].h <= 0.0,
        radial: d.radial,
        angular: d.angular,
    })
}

/// Lower bound for `λ²` from the outer boundary circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenLowerBound {
    pub lambda: f64,
    pub lambda_sq: f64,
    pub lower_bound: f64,
    pub margin: f64,
    pub ricci_term: f64,
    pub second_form_term: f64,
    pub denominator: f64,
    /// Slice scale `f = G(b)` at the outer circle.
    pub scale: f64,
}

fn outer_ring_positive(sol: &DirichletSolution) -> Result<BoundaryRing> {
    let ring = sol.boundary_ring(true)?;
    if ring.h <= 0.0 {
        return Err(LabError::NonpositiveMeanCurvature(ring.h));
    }
    Ok(ring)
}

/// `λ² ≥ [∫_Ω Ric(∇u,∇u) + ∫_K II(∇f₀,∇f₀)] / ∫_K f₀² / (f⁴ H)` over the outer circle `K`.
pub fn theorem4_bound(sol: &DirichletSolution, lambda: f64) -> Result<EigenLowerBound> {
    let ring = outer_ring_positive(sol)?;
    let [_, _, ric, _] = sol.volume_terms()?;
    let f = ring.g;
    let second = sol.ring_integral(&ring, |j| ring.h * ring.grad_boundary_sq[j]);
    let denom = sol.ring_integral(&ring, |j| ring.u[j] * ring.u[j] / (f.powi(4) * ring.h));
    if !(denom > 0.0) {
        return Err(LabError::DegenerateTestFunction(denom));
    }
    let lower_bound = (ric + second) / denom;
    Ok(EigenLowerBound {
        lambda,
        lambda_sq: lambda * lambda,
        lower_bound,
        margin: lambda * lambda - lower_bound,
        ricci_term: ric,
        second_form_term: second,
        denominator: denom,
        scale: f,
    })
}

/// Minimum over the outer circle of `H u_ν² + 2(λ/f²) f₀ u_ν + λ² f₀² / (f⁴ H)`.
/// `u_nu_override` replaces the computed normal derivative.
pub fn square_completion_check(sol: &DirichletSolution, lambda: f64, u_nu_override: Option<&[f64]>) -> Result<f64> {
    let ring = outer_ring_positive(sol)?;
    let f2 = ring.g * ring.g;
    let u_nu = u_nu_override.unwrap_or(&ring.u_nu);
    if u_nu.len() != ring.u.len() {
        return Err(LabError::Precondition("normal derivative override has the wrong length".into()));
    }
    Ok((0..ring.u.len())
        .map(|j| {
            let (f0, un) = (ring.u[j], u_nu[j]);
            ring.h * un * un + 2.0 * (lambda / f2) * f0 * un + lambda * lambda * f0 * f0 / (f2 * f2 * ring.h)
        })
        .fold(f64::INFINITY, f64::min))
}

/// Outer-circle normal derivative at which the completed square vanishes.
pub fn square_vertex(sol: &DirichletSolution, lambda: f64) -> Result<Vec<f64>> {
    let ring = outer_ring_positive(sol)?;
    Ok(ring.u.iter().map(|f0| -lambda * f0 / (ring.g * ring.g * ring.h)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaCheck {
    pub kappa: f64,
    /// `∫_K II(∇f₀, ∇f₀)`
    pub lhs: f64,
    /// `κ (λ/f²) ∫_K f₀²`
    pub rhs: f64,
    pub dirichlet_energy: f64,
    pub boundary_flux: f64,
    /// `|∫_Ω |∇u|² - ∫_∂Ω u u_ν|`, relative.
    pub green_residual: f64,
    /// `|∫_K |∇f₀|² - (λ/f²) ∫_K f₀²|`, relative.
    pub dirichlet_energy_residual: f64,
}

/// Curvature bound on the outer circle plus the Green and boundary-energy identities.
pub fn kappa_bound_check(sol: &DirichletSolution, lambda: f64) -> Result<KappaCheck> {
    let rings = sol.boundary_rings()?;
    let outer = &rings[0];
    let f2 = outer.g * outer.g;
    let kappa = outer.h;
    let lhs = sol.ring_integral(outer, |j| outer.h * outer.grad_boundary_sq[j]);
    let f0_sq = sol.ring_integral(outer, |j| outer.u[j] * outer.u[j]);
    let rhs = kappa * (lambda / f2) * f0_sq;
    let energy = sol.stiffness.bilinear(&sol.u, &sol.u);
    let flux: f64 = rings.iter().map(|r| sol.ring_integral(r, |j| r.u[j] * r.u_nu[j])).sum();
    let grad_sq = sol.ring_integral(outer, |j| outer.grad_boundary_sq[j]);
    let eig = (lambda / f2) * f0_sq;
    Ok(KappaCheck {
        kappa,
        lhs,
        rhs,
        dirichlet_energy: energy,
        boundary_flux: flux,
        green_residual: (energy - flux).abs() / energy.abs().max(flux.abs()).max(1e-300),
        dirichlet_energy_residual: (grad_sq - eig).abs() / grad_sq.abs().max(eig.abs()).max(1e-300),
    })
}

/// Ledgers at each resolution, `n` radial intervals by `n` angular nodes.
pub fn reilly_refinement(
    profile: &RotationalProfile,
    data: BoundaryMode,
    resolutions: &[usize],
) -> Result<Vec<(usize, ReillyLedger)>> {
    resolutions
        .iter()
        .map(|&n| {
            let domain = RotationalDomain::new(profile.clone(), n, n)?;
            let sol = harmonic_extension(&DirichletProblem { domain, data })?;
            Ok((n, reilly_ledger(&sol)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(n: usize, k: u32) -> DirichletSolution {
        let domain = RotationalDomain::disc(1.0, n).unwrap();
        harmonic_extension(&DirichletProblem { domain, data: BoundaryMode::cosine(k) }).unwrap()
    }

    #[test]
    fn assembled_operator_is_consistent() {
        let d = RotationalDomain::disc(1.0, 16).unwrap();
        let (k, w) = d.assemble().unwrap();
        assert!(k.asymmetry() <= 1e-12 && k.max_row_sum() <= 1e-12);
        assert!((w.iter().sum::<f64>() - PI).abs() < 1e-12);
        let c = RotationalDomain::new(RotationalProfile::Cylinder { length: 2.0, radius: 1.0 }, 8, 16).unwrap();
        let (_, w) = c.assemble().unwrap();
        assert!((w.iter().sum::<f64>() - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn constant_data_extends_to_constant() {
        let domain = RotationalDomain::disc(1.0, 16).unwrap();
        let s = harmonic_extension(&DirichletProblem { domain, data: BoundaryMode::constant(2.5) }).unwrap();
        assert!(s.u.iter().all(|v| (v - 2.5).abs() < 1e-12));
    }

    #[test]
    fn harmonic_polynomials_are_recovered() {
        for k in [1u32, 2] {
            let errs: Vec<f64> = [16usize, 32, 64]
                .iter()
                .map(|&n| {
                    let s = disc(n, k);
                    assert!(s.max_principle && s.interior_residual <= 1e-10);
                    let d = &s.problem.domain;
                    let mut e: f64 = 0.0;
                    for i in 1..=d.radial {
                        for j in 0..d.angular {
                            let exact = d.rho(i).powi(k as i32) * (k as f64 * d.theta(j)).cos();
                            e = e.max((s.u[d.index(i, j)] - exact).abs());
                        }
                    }
                    e
                })
                .collect();
            for w in errs.windows(2) {
                let order = (w[0] / w[1]).log2();
                assert!(order > 1.5, "k = {k}, errors {errs:?}");
            }
        }
    }

    #[test]
    fn disc_ledgers_match_closed_forms() {
        let l = reilly_ledger(&disc(64, 2)).unwrap();
        assert!((l.lhs + 8.0 * PI).abs() < 0.02 * 8.0 * PI, "{l:?}");
        assert!((l.rhs + 8.0 * PI).abs() < 0.02 * 8.0 * PI, "{l:?}");
        let l1 = reilly_ledger(&disc(64, 1)).unwrap();
        assert!(l1.lhs.abs() < 0.05 && l1.rhs.abs() < 0.05, "{l1:?}");
    }

    #[test]
    fn cylinder_balances_and_is_flagged() {
        let len = 2.0;
        let domain = RotationalDomain::new(RotationalProfile::Cylinder { length: len, radius: 1.0 }, 64, 64).unwrap();
        let s = harmonic_extension(&DirichletProblem { domain, data: BoundaryMode::cosine(1) }).unwrap();
        let l = reilly_ledger(&s).unwrap();
        let exact = -4.0 * PI * (len / 2.0).tanh();
        assert!(l.nonpositive_mean_curvature);
        assert!((l.lhs - exact).abs() < 0.02 * exact.abs() && (l.rhs - exact).abs() < 0.02 * exact.abs(), "{l:?}");
        assert!(matches!(theorem4_bound(&s, 1.0), Err(LabError::NonpositiveMeanCurvature(_))));
        let kc = kappa_bound_check(&s, 1.0).unwrap();
        assert_eq!((kc.kappa, kc.lhs, kc.rhs), (0.0, 0.0, 0.0));
    }

    #[test]
    fn disc_bounds() {
        let s = disc(64, 1);
        let b = theorem4_bound(&s, 1.0).unwrap();
        assert!((b.lower_bound - 1.0).abs() < 0.01, "{b:?}");
        let s2 = disc(64, 2);
        let b2 = theorem4_bound(&s2, 4.0).unwrap();
        assert!((b2.lower_bound - 4.0).abs() < 0.04 && b2.margin > 0.0, "{b2:?}");
        assert!(square_completion_check(&s, 1.0, None).unwrap() >= -1e-12);
        let vertex = square_vertex(&s, 1.0).unwrap();
        assert!(square_completion_check(&s, 1.0, Some(&vertex)).unwrap().abs() < 1e-12);
        let k = kappa_bound_check(&s, 1.0).unwrap();
        assert!((k.lhs - PI).abs() < 0.01 * PI && (k.rhs - PI).abs() < 0.01 * PI);
        assert!(k.green_residual < 0.01 && k.dirichlet_energy_residual < 0.01);
    }
}
