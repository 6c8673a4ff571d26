//! Python bindings for warplab.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use warplab::geometry::{FiberDescriptor, WarpedProductSpace};
use warplab::intersection::{intersection_angle as angle_at, make_rotation_hypersurface};
use warplab::report::VerificationReport;
use warplab::runner::{run_text, RunOptions};
use warplab::spectral::{
    harmonic_extension, lowest_eigenpairs, reilly_ledger, theorem4_bound, BoundaryMode, DirichletProblem,
    DiscreteLaplacian, RotationalDomain, LANCZOS_SEED,
};
use warplab::warp::{catalog, Domain1D, WarpingFunction};
use warplab::LabError;

fn err(e: LabError) -> PyErr {
    match e.exit_code() {
        3 => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// A positive warping function of one variable.
#[pyclass(name = "Warp", module = "warplab_py")]
struct PyWarp {
    inner: WarpingFunction,
}

#[pymethods]
impl PyWarp {
    #[staticmethod]
    #[pyo3(signature = (name, value=None, half_width=None))]
    fn catalog(name: &str, value: Option<f64>, half_width: Option<f64>) -> PyResult<Self> {
        let inner = match name {
            "constant" => catalog::constant(value.unwrap_or(1.0)),
            "two-plus-cos" => catalog::two_plus_cos(),
            "cosh" => catalog::cosh(half_width.unwrap_or(1.0)),
            other => Err(LabError::UnknownCatalog(other.to_string())),
        }
        .map_err(err)?;
        Ok(PyWarp { inner })
    }

    /// Expression in `t` on a circle of the given period, or on `interval` if set.
    #[staticmethod]
    #[pyo3(signature = (expr, period=std::f64::consts::TAU, interval=None))]
    fn expression(expr: &str, period: f64, interval: Option<(f64, f64)>) -> PyResult<Self> {
        let domain = match interval {
            Some((a, b)) => Domain1D::interval(a, b),
            None => Domain1D::circle(period),
        }
        .map_err(err)?;
        Ok(PyWarp { inner: WarpingFunction::parse(expr, domain).map_err(err)? })
    }

    /// `(f, f', f'')` at `t`.
    fn eval(&self, t: f64) -> PyResult<(f64, f64, f64)> {
        self.inner.eval(t).map_err(err)
    }

    /// Mean curvature `f'/f` of the slice at `t`.
    fn mean_curvature(&self, t: f64) -> PyResult<f64> {
        self.inner.mean_curvature(t).map_err(err)
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label().to_string()
    }

    fn __repr__(&self) -> String {
        format!("Warp({})", self.inner.label())
    }
}

#[pyclass(name = "Report", module = "warplab_py")]
struct PyReport {
    inner: VerificationReport,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn passed(&self) -> bool {
        self.inner.pass
    }

    #[getter]
    fn scenario(&self) -> String {
        self.inner.scenario.clone()
    }

    /// `(id, lhs, rhs, residual, tolerance, verdict)` for every check.
    fn checks(&self) -> Vec<(String, f64, f64, f64, f64, bool)> {
        self.inner
            .checks
            .iter()
            .map(|c| (c.id.clone(), c.lhs, c.rhs, c.residual, c.tolerance, c.verdict))
            .collect()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn refinement_csv(&self) -> String {
        self.inner.refinement_csv()
    }
}

/// Both sides of the horizontal Ricci integral identity with an `S^q` fiber:
/// `(lhs, rhs, product_verdict)`.
#[pyfunction]
#[pyo3(signature = (warp, q, nodes=512))]
fn theorem1_sides(warp: &PyWarp, q: usize, nodes: usize) -> PyResult<(f64, f64, bool)> {
    let space = WarpedProductSpace::over_line(warp.inner.clone(), FiberDescriptor::sphere(q).map_err(err)?);
    let r = warplab::integral::theorem1_sides(&space, nodes).map_err(err)?;
    Ok((r.lhs, r.rhs, r.product_verdict))
}

/// Lowest `k` nonzero eigenvalues of the slice `{t} × S¹(radius)`.
#[pyfunction]
#[pyo3(signature = (warp, t, k, radius=1.0))]
fn slice_spectrum(warp: &PyWarp, t: f64, k: usize, radius: f64) -> PyResult<Vec<f64>> {
    let fiber = FiberDescriptor::circle(radius).map_err(err)?;
    warplab::spectral::slice_spectrum(&fiber, &warp.inner, t, k).map_err(err)
}

/// Lowest `k` nonzero eigenvalues of the discrete Laplacian on a circle.
#[pyfunction]
fn circle_eigenvalues(radius: f64, nodes: usize, k: usize) -> PyResult<Vec<f64>> {
    let l = DiscreteLaplacian::circle(radius, nodes).map_err(err)?;
    Ok(lowest_eigenpairs(&l, k, LANCZOS_SEED).map_err(err)?.into_iter().map(|p| p.value).collect())
}

/// Angle between the rotation hypersurface of `warp` and the hyperplane `x₁ = t0`.
#[pyfunction]
#[pyo3(signature = (warp, t0, ambient_dim=3))]
fn intersection_angle(warp: &PyWarp, t0: f64, ambient_dim: usize) -> PyResult<f64> {
    let m = make_rotation_hypersurface(&warp.inner, ambient_dim).map_err(err)?;
    angle_at(&m, t0).map_err(err)
}

/// Reilly ledger `(lhs, rhs)` on the unit disc with boundary data `cos(kθ)`.
#[pyfunction]
fn reilly_disc(n: usize, k: u32) -> PyResult<(f64, f64)> {
    let domain = RotationalDomain::disc(1.0, n).map_err(err)?;
    let sol = harmonic_extension(&DirichletProblem { domain, data: BoundaryMode::cosine(k) }).map_err(err)?;
    let l = reilly_ledger(&sol).map_err(err)?;
    Ok((l.lhs, l.rhs))
}

/// Eigenvalue lower bound `(lower_bound, margin)` on the unit disc with data `cos(kθ)`.
#[pyfunction]
fn eigen_lower_bound_disc(n: usize, k: u32, lam: f64) -> PyResult<(f64, f64)> {
    let domain = RotationalDomain::disc(1.0, n).map_err(err)?;
    let sol = harmonic_extension(&DirichletProblem { domain, data: BoundaryMode::cosine(k) }).map_err(err)?;
    let b = theorem4_bound(&sol, lam).map_err(err)?;
    Ok((b.lower_bound, b.margin))
}

/// Run a scenario given as JSON text.
#[pyfunction]
#[pyo3(signature = (text, seed=None, refine=None, tolerance_scale=1.0))]
fn run_scenario(text: &str, seed: Option<u64>, refine: Option<usize>, tolerance_scale: f64) -> PyResult<PyReport> {
    let opts = RunOptions { seed, refine, tolerance_scale, ..RunOptions::default() };
    Ok(PyReport { inner: run_text(text, &opts).map_err(err)? })
}

#[pymodule]
fn warplab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyWarp>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(theorem1_sides, m)?)?;
    m.add_function(wrap_pyfunction!(slice_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(circle_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(intersection_angle, m)?)?;
    m.add_function(wrap_pyfunction!(reilly_disc, m)?)?;
    m.add_function(wrap_pyfunction!(eigen_lower_bound_disc, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    Ok(())
}
