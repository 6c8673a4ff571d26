//! Discrete Laplace–Beltrami spectra, harmonic extensions on rotational
//! surfaces and the eigenvalue bounds built on them.

mod firsteigen;
mod laplacian;
mod rotational;
mod solvers;
mod sparse;

pub use firsteigen::{
    gradient_identity_check, theorem3_bound, AngleSample, ClosedCurveInSurface, CurveShape, FirstEigenBound,
    GradientIdentityCheck, DEGENERATE_TOL,
};
pub use laplacian::{DiscreteLaplacian, MeshKind};
pub use rotational::{
    harmonic_extension, kappa_bound_check, reilly_ledger, reilly_refinement, square_completion_check, square_vertex,
    theorem4_bound, BoundaryMode, DirichletProblem, DirichletSolution, EigenLowerBound, KappaCheck, ReillyLedger,
    RotationalDomain, RotationalProfile, DIRICHLET_TOL,
};
pub use solvers::{conjugate_gradient, lowest_eigenpairs, solve_spd, CgStats, Eigenpair, EIGEN_RESIDUAL_TOL, LANCZOS_SEED};
pub use sparse::{CsrMatrix, TripletBuilder};

use crate::error::Result;
use crate::geometry::FiberDescriptor;
use crate::warp::WarpingFunction;

/// The `k` lowest nonzero eigenvalues of the slice `{t} × P`, whose metric is
/// `f(t)² g_P`: each fiber eigenvalue divided by `f(t)²`, repeated by multiplicity.
pub fn slice_spectrum(fiber: &FiberDescriptor, wf: &WarpingFunction, t: f64, k: usize) -> Result<Vec<f64>> {
    let f = wf.value(t)?;
    Ok(fiber.nonzero_eigenvalues(k)?.into_iter().map(|l| l / (f * f)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::warp::catalog;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn slice_spectrum_examples() {
        let s = slice_spectrum(&FiberDescriptor::circle(1.0).unwrap(), &catalog::two_plus_cos().unwrap(), FRAC_PI_2, 2)
            .unwrap();
        assert_eq!(s, vec![0.25, 0.25]);
        let s2 = slice_spectrum(&FiberDescriptor::sphere(2).unwrap(), &catalog::constant(1.0).unwrap(), 0.0, 1).unwrap();
        assert_eq!(s2, vec![2.0]);
        let c = slice_spectrum(&FiberDescriptor::sphere(2).unwrap(), &catalog::constant(3.0).unwrap(), 0.0, 4).unwrap();
        assert!(c.iter().zip(&s2).all(|(a, b)| (a - b / 9.0).abs() < 1e-15));
        let missing = FiberDescriptor::abstract_fiber(3, 1.0, None).unwrap();
        assert!(slice_spectrum(&missing, &catalog::constant(1.0).unwrap(), 0.0, 1).is_err());
    }

    #[test]
    fn discrete_slice_matches_rescaled_fiber() {
        let wf = catalog::two_plus_cos().unwrap();
        let f = wf.value(FRAC_PI_2).unwrap();
        let exact = slice_spectrum(&FiberDescriptor::circle(1.0).unwrap(), &wf, FRAC_PI_2, 2).unwrap();
        let errs: Vec<f64> = [32usize, 64, 128]
            .iter()
            .map(|&n| {
                let l = DiscreteLaplacian::circle(f, n).unwrap();
                (lowest_eigenpairs(&l, 1, LANCZOS_SEED).unwrap()[0].value - exact[0]).abs()
            })
            .collect();
        for w in errs.windows(2) {
            assert!(((w[0] / w[1]).log2() - 2.0).abs() < 0.2);
        }
    }
}
