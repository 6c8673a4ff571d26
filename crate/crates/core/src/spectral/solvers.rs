//! Conjugate gradients and shift-invert Lanczos for the discrete operators.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::laplacian::DiscreteLaplacian;
use super::sparse::CsrMatrix;
use crate::error::{LabError, Result};
use crate::quadrature::pairwise_sum;

/// Relative residual required of each eigenpair.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-8;
/// Relative residual of inner solves.
pub const INNER_CG_TOL: f64 = 1e-13;
/// Default seed for the Lanczos starting vector.
pub const LANCZOS_SEED: u64 = 0x5eed;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    pairwise_sum(&a.iter().zip(b).map(|(x, y)| x * y).collect::<Vec<_>>())
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CgStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Jacobi-preconditioned CG for `A x = b` with `A` symmetric positive
/// definite on the subspace the iteration stays in. `project`, when given,
/// is applied to every residual so the iteration stays in a complement.
pub fn conjugate_gradient(
    apply: &dyn Fn(&[f64], &mut [f64]),
    diag: &[f64],
    b: &[f64],
    x: &mut [f64],
    project: Option<&dyn Fn(&mut [f64])>,
    tol: f64,
    max_iter: usize,
) -> Result<CgStats> {
    let n = b.len();
    let bnorm = norm(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(CgStats { iterations: 0, relative_residual: 0.0 });
    }
    let mut ax = vec![0.0; n];
    apply(x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(a, c)| a - c).collect();
    if let Some(p) = project {
        p(&mut r);
    }
    let precondition = |r: &[f64]| -> Vec<f64> {
        let mut z: Vec<f64> = r.iter().zip(diag).map(|(a, d)| a / d).collect();
        if let Some(p) = project {
            p(&mut z);
        }
        z
    };
    let mut z = precondition(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 0..max_iter {
        let rel = norm(&r) / bnorm;
        if rel <= tol {
            return Ok(CgStats { iterations: it, relative_residual: rel });
        }
        apply(&p, &mut ap);
        if let Some(pr) = project {
            pr(&mut ap);
        }
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(LabError::NoConvergence(format!("conjugate gradients broke down (pᵀAp = {pap})")));
        }
        let alpha = rz / pap;
        axpy(x, alpha, &p);
        axpy(&mut r, -alpha, &ap);
        z = precondition(&r);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    let rel = norm(&r) / bnorm;
    if rel <= tol {
        return Ok(CgStats { iterations: max_iter, relative_residual: rel });
    }
    Err(LabError::NoConvergence(format!("conjugate gradients stalled at relative residual {rel:.3e}")))
}

/// CG on a sparse matrix.
pub fn solve_spd(a: &CsrMatrix, b: &[f64], x: &mut [f64], tol: f64) -> Result<CgStats> {
    let diag = a.diagonal();
    conjugate_gradient(&|v, out| a.matvec(v, out), &diag, b, x, None, tol, 20 * a.dim() + 100)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenpair {
    pub value: f64,
    /// Nodal values, normalized so that `Σ W φ² = 1`.
    pub vector: Vec<f64>,
    pub relative_residual: f64,
}

/// The `k` smallest nonzero eigenvalues of `-Δ_h`, found one at a time by
/// shift-invert Lanczos with full reorthogonalization. Constants and every
/// pair already found are deflated before the next run.
pub fn lowest_eigenpairs(l: &DiscreteLaplacian, k: usize, seed: u64) -> Result<Vec<Eigenpair>> {
    let n = l.dim();
    if k == 0 || k >= n {
        return Err(LabError::Precondition(format!("need 1 <= k < {n}, got {k}")));
    }
    let sqrt_w: Vec<f64> = l.weights.iter().map(|w| w.sqrt()).collect();
    // A = W^{-1/2} K W^{-1/2}
    let apply_a = |x: &[f64], out: &mut [f64]| {
        let scaled: Vec<f64> = x.iter().zip(&sqrt_w).map(|(a, s)| a / s).collect();
        l.stiffness.matvec(&scaled, out);
        out.iter_mut().zip(&sqrt_w).for_each(|(o, s)| *o /= s);
    };
    let diag_a: Vec<f64> = l.stiffness.diagonal().iter().zip(&l.weights).map(|(d, w)| d / w).collect();
    let total = norm(&sqrt_w);
    let mut deflated: Vec<Vec<f64>> = vec![sqrt_w.iter().map(|s| s / total).collect()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(k);

    for _ in 0..k {
        let project = |v: &mut [f64]| {
            for d in &deflated {
                let c = dot(v, d);
                axpy(v, -c, d);
            }
        };
        let null_only = |v: &mut [f64]| {
            let c = dot(v, &deflated[0]);
            axpy(v, -c, &deflated[0]);
        };
        let invert = |x: &[f64]| -> Result<Vec<f64>> {
            let mut y = vec![0.0; n];
            conjugate_gradient(&apply_a, &diag_a, x, &mut y, Some(&null_only), INNER_CG_TOL, 20 * n + 100)?;
            project(&mut y);
            Ok(y)
        };
        let mut start: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
        project(&mut start);
        let free = n - deflated.len();
        let mut steps = free.min(40);
        let pair = loop {
            let (value, v, residual) = lanczos_largest(&invert, &apply_a, &start, steps, &project)?;
            if residual <= EIGEN_RESIDUAL_TOL * value.max(1.0) {
                break Eigenpair {
                    value,
                    vector: v.iter().zip(&sqrt_w).map(|(a, s)| a / s).collect(),
                    relative_residual: residual,
                };
            }
            if steps >= free {
                return Err(LabError::NoConvergence(format!(
                    "Lanczos residual {residual:.3e} after {steps} steps for eigenvalue {value:.6e}"
                )));
            }
            steps = (2 * steps).min(free);
        };
        deflated.push(pair.vector.iter().zip(&sqrt_w).map(|(a, s)| a * s).collect());
        out.push(pair);
    }
    out.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap());
    Ok(out)
}

/// One Lanczos run on the inverse operator; returns the Rayleigh quotient of
/// `A` at the dominant Ritz vector, the unit vector, and `‖Av - λv‖`.
fn lanczos_largest(
    invert: &dyn Fn(&[f64]) -> Result<Vec<f64>>,
    apply_a: &dyn Fn(&[f64], &mut [f64]),
    start: &[f64],
    steps: usize,
    project: &dyn Fn(&mut [f64]),
) -> Result<(f64, Vec<f64>, f64)> {
    let n = start.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(steps);
    let mut alpha = Vec::with_capacity(steps);
    let mut beta: Vec<f64> = Vec::with_capacity(steps);
    let s = norm(start);
    basis.push(start.iter().map(|x| x / s).collect());
    for j in 0..steps {
        let mut w = invert(&basis[j])?;
        let a = dot(&w, &basis[j]);
        alpha.push(a);
        // full reorthogonalization, twice for stability
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                axpy(&mut w, -c, b);
            }
        }
        project(&mut w);
        let b = norm(&w);
        if j + 1 == steps || b <= 1e-14 * a.abs().max(1e-300) {
            break;
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
    let m = alpha.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let top = (0..m).max_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap()).unwrap();
    let mut v = vec![0.0; n];
    for (i, b) in basis.iter().take(m).enumerate() {
        axpy(&mut v, eig.eigenvectors[(i, top)], b);
    }
    project(&mut v);
    let vn = norm(&v);
    v.iter_mut().for_each(|x| *x /= vn);
    let mut av = vec![0.0; n];
    apply_a(&v, &mut av);
    let value = dot(&v, &av);
    axpy(&mut av, -value, &v);
    Ok((value, v, norm(&av)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn circle_spectrum_with_multiplicity() {
        let l = DiscreteLaplacian::circle(1.0, 256).unwrap();
        let pairs = lowest_eigenpairs(&l, 4, LANCZOS_SEED).unwrap();
        let h = 2.0 * PI / 256.0;
        let exact = |k: f64| (2.0 / h * (k * h / 2.0).sin()).powi(2);
        assert!((pairs[0].value - exact(1.0)).abs() < 1e-10);
        assert!((pairs[1].value - exact(1.0)).abs() < 1e-10);
        assert!((pairs[2].value - exact(2.0)).abs() < 1e-9);
        assert!((pairs[3].value - exact(2.0)).abs() < 1e-9);
        assert!(pairs.iter().all(|p| p.relative_residual <= 1e-8 * p.value.max(1.0)));
        assert!((pairs[0].value - 1.0).abs() < 1e-4);
    }

    #[test]
    fn torus_first_eigenvalue() {
        let l = DiscreteLaplacian::flat_torus([1.0, 2.0], [32, 64]).unwrap();
        let p = lowest_eigenpairs(&l, 1, LANCZOS_SEED).unwrap();
        let h = 2.0 / 64.0;
        let exact = (2.0 / h * (PI * h / 2.0).sin()).powi(2);
        assert!((p[0].value - exact).abs() < 1e-9 * exact);
        assert!((p[0].value - PI * PI).abs() < 1e-2);
    }

    #[test]
    fn eigenvectors_are_mean_zero() {
        let l = DiscreteLaplacian::closed_curve(&(0..50).map(|i| 0.1 + 0.01 * (i as f64).sin()).collect::<Vec<_>>()).unwrap();
        for p in lowest_eigenpairs(&l, 3, 1).unwrap() {
            let ones = vec![1.0; l.dim()];
            assert!(l.inner(&p.vector, &ones).abs() < 1e-10);
        }
    }

    #[test]
    fn cg_solves_spd_system() {
        let mut b = crate::spectral::sparse::TripletBuilder::new(3);
        b.add(0, 0, 4.0);
        b.add(1, 1, 3.0);
        b.add(2, 2, 2.0);
        b.add_edge(0, 1, 1.0);
        let a = b.build();
        let mut x = vec![0.0; 3];
        solve_spd(&a, &[1.0, 2.0, 3.0], &mut x, 1e-14).unwrap();
        let r = a.mul(&x);
        assert!((r[0] - 1.0).abs() < 1e-12 && (r[1] - 2.0).abs() < 1e-12 && (r[2] - 3.0).abs() < 1e-12);
    }
}
