//! Scenario files: JSON descriptions of a warped product plus the checks to
//! run on it.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::geometry::{FiberDescriptor, Warp, WarpedProductSpace};
use crate::intersection::Section;
use crate::spectral::{BoundaryMode, CurveShape, RotationalProfile};
use crate::warp::{catalog, schwarzschild_profile, Domain1D, ScalarFieldM, SchwarzschildParams, WarpingFunction};

pub const MIN_QUADRATURE_NODES: usize = 16;
pub const MIN_MESH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Theorem1,
    Intersections,
    Spectral,
    Reilly,
    All,
}

impl Suite {
    pub fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

/// Warp declaration: a catalog entry or an expression in `t` (or `t1, t2, ...` on a torus).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum WarpSpec {
    Catalog {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        value: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        half_width: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        interval: Option<[f64; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        schwarzschild: Option<SchwarzschildParams>,
    },
    Expression {
        expr: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        domain: Option<Domain1D>,
        /// Periods of a torus base; the expression then uses `t1, t2, ...`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        torus: Option<Vec<f64>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum FiberSpec {
    Sphere(usize),
    Circle(f64),
    Abstract {
        dim: usize,
        volume: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        spectrum: Option<Vec<(f64, usize)>>,
    },
}

/// Tolerances; every one is multiplied by the CLI's `--tolerance-scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative tolerance for identities built from exact derivatives.
    pub identity: f64,
    /// Relative tolerance for anything touching a PDE mesh.
    pub mesh: f64,
    /// Relative tolerance for equality cases on a mesh.
    pub sharp: f64,
    /// Finite-difference tolerance.
    pub fd: f64,
    /// Absolute tolerance for quantities that vanish identically.
    pub zero: f64,
    /// Half-width of the accepted band around a nominal finite-difference order.
    pub order: f64,
    /// Same, for discrete eigenvalues.
    pub eigen_order: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { identity: 1e-8, mesh: 0.02, sharp: 0.01, fd: 1e-6, zero: 1e-12, order: 0.3, eigen_order: 0.2 }
    }
}

impl Tolerances {
    pub fn scaled(&self, s: f64) -> Self {
        Tolerances {
            identity: self.identity * s,
            mesh: self.mesh * s,
            sharp: self.sharp * s,
            fd: self.fd * s,
            zero: self.zero * s,
            order: self.order * s,
            eigen_order: self.eigen_order * s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Theorem1Section {
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    /// Expected common value of both sides.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_product: Option<bool>,
    /// Random points for the pointwise log-warp identity.
    #[serde(default = "default_log_points")]
    pub log_warp_points: usize,
    /// Window `[a, b]` for the noncompact integral.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_window_negative: Option<bool>,
}

fn default_nodes() -> usize {
    512
}

fn default_log_points() -> usize {
    100
}

impl Default for Theorem1Section {
    fn default() -> Self {
        Theorem1Section {
            nodes: default_nodes(),
            expect: None,
            expect_product: None,
            log_warp_points: default_log_points(),
            window: None,
            expect_window_negative: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntersectionsSection {
    /// Dimension of the Euclidean space containing the rotation hypersurface.
    #[serde(default = "default_ambient")]
    pub ambient_dim: usize,
    /// Levels `t₀` at which the hypersurface is cut.
    #[serde(default)]
    pub levels: Vec<f64>,
    #[serde(default = "default_sections")]
    pub sections: Vec<Section>,
    /// Random arclength curves for the height identity.
    #[serde(default)]
    pub curves: usize,
    /// Dimensions for the parabolicity witness.
    #[serde(default)]
    pub parabolic_dims: Vec<usize>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_ambient() -> usize {
    3
}

fn default_sections() -> Vec<Section> {
    vec![Section::Hyperplane]
}

fn default_samples() -> usize {
    10_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralSection {
    /// Level of the slice whose spectrum is discretized.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slice_t: Option<f64>,
    /// Coarsest circle grid; refined by doubling.
    #[serde(default = "default_circle_nodes")]
    pub circle_nodes: usize,
    /// Closed curve for the first-eigenvalue bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveShape>,
    #[serde(default = "default_curve_nodes")]
    pub curve_nodes: usize,
}

fn default_circle_nodes() -> usize {
    32
}

fn default_curve_nodes() -> usize {
    512
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ReillyDomain {
    Disc { radius: f64 },
    Cylinder { length: f64, radius: f64 },
    /// Radial range of the scenario warp, `dρ² + f(ρ)² dθ²`.
    Warp { a: f64, b: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReillySection {
    pub domain: ReillyDomain,
    pub mode: BoundaryMode,
    /// Fiber eigenvalue of the boundary data; defaults to `k²`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Coarsest mesh (radial = angular); refined by doubling.
    #[serde(default = "default_mesh")]
    pub mesh: usize,
    /// Closed-form value of both sides of the identity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<f64>,
    /// The eigenvalue bound should be attained.
    #[serde(default)]
    pub expect_sharp: bool,
    /// The outer mean curvature should be nonpositive.
    #[serde(default)]
    pub expect_nonpositive: bool,
}

fn default_mesh() -> usize {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub suite: Suite,
    #[serde(default)]
    pub seed: u64,
    pub warp: WarpSpec,
    pub fiber: FiberSpec,
    /// Number of refinements beyond the coarsest level.
    #[serde(default = "default_refine")]
    pub refine: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theorem1: Option<Theorem1Section>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intersections: Option<IntersectionsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectral: Option<SpectralSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reilly: Option<ReillySection>,
}

fn default_refine() -> usize {
    2
}

fn invalid(msg: impl Into<String>) -> LabError {
    LabError::InvalidScenario(msg.into())
}

fn need(name: &str, field: &str, v: Option<f64>) -> Result<f64> {
    v.ok_or_else(|| invalid(format!("catalog warp '{name}' needs '{field}'")))
}

impl WarpSpec {
    pub fn build(&self) -> Result<Warp> {
        match self {
            WarpSpec::Catalog { name, value, half_width, a, b, interval, schwarzschild } => {
                let wf = match name.as_str() {
                    "constant" => catalog::constant(value.unwrap_or(1.0))?,
                    "two-plus-cos" => catalog::two_plus_cos()?,
                    "cosh" => catalog::cosh(half_width.unwrap_or(1.0))?,
                    "affine" => {
                        let [lo, hi] = interval.unwrap_or([0.0, 1.0]);
                        catalog::affine(need(name, "a", *a)?, need(name, "b", *b)?, lo, hi)?
                    }
                    "schwarzschild" => schwarzschild_profile(
                        schwarzschild.ok_or_else(|| invalid("catalog warp 'schwarzschild' needs 'schwarzschild'"))?,
                    )?,
                    other => return Err(LabError::UnknownCatalog(other.to_string())),
                };
                Ok(Warp::OneD(wf))
            }
            WarpSpec::Expression { expr, domain, torus } => match (domain, torus) {
                (_, Some(periods)) => Ok(Warp::Torus(ScalarFieldM::parse(expr, periods.clone())?)),
                (Some(d), None) => Ok(Warp::OneD(WarpingFunction::parse(expr, *d)?)),
                (None, None) => Ok(Warp::OneD(WarpingFunction::parse(expr, Domain1D::circle(2.0 * PI)?)?)),
            },
        }
    }
}

impl FiberSpec {
    pub fn build(&self) -> Result<FiberDescriptor> {
        match self {
            FiberSpec::Sphere(q) => FiberDescriptor::sphere(*q),
            FiberSpec::Circle(r) => FiberDescriptor::circle(*r),
            FiberSpec::Abstract { dim, volume, spectrum } => {
                FiberDescriptor::abstract_fiber(*dim, *volume, spectrum.clone())
            }
        }
    }
}

/// 1-based line and column of a byte offset.
fn line_column(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

impl Scenario {
    /// Parse and validate scenario JSON.
    pub fn parse(src: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(src)
            .map_err(|e| LabError::ScenarioParse { line: e.line(), column: e.column(), message: e.to_string() })?;
        s.validate().map_err(|e| match e {
            LabError::InvalidScenario(m) => {
                let (line, column) = src.find("\"name\"").map_or((1, 1), |o| line_column(src, o));
                LabError::ScenarioParse { line, column, message: m }
            }
            other => other,
        })?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        if [t.identity, t.mesh, t.sharp, t.fd, t.zero, t.order, t.eigen_order].iter().any(|x| !(*x > 0.0)) {
            return Err(invalid("tolerances must be positive"));
        }
        if let Some(s) = &self.theorem1 {
            if s.nodes < MIN_QUADRATURE_NODES {
                return Err(invalid(format!("theorem1.nodes must be at least {MIN_QUADRATURE_NODES}")));
            }
        }
        if let Some(s) = &self.spectral {
            if s.circle_nodes < MIN_MESH || s.curve_nodes < MIN_MESH {
                return Err(invalid(format!("spectral grids need at least {MIN_MESH} nodes")));
            }
        }
        if let Some(r) = &self.reilly {
            if r.mesh < MIN_MESH {
                return Err(invalid(format!("reilly.mesh must be at least {MIN_MESH}")));
            }
        }
        if let Some(i) = &self.intersections {
            if i.ambient_dim < 2 {
                return Err(invalid("intersections.ambient_dim must be at least 2"));
            }
        }
        Ok(())
    }

    pub fn space(&self) -> Result<WarpedProductSpace> {
        Ok(WarpedProductSpace::new(self.warp.build()?, self.fiber.build()?))
    }

    /// The warp as a function of one variable, or an error naming `what`.
    pub fn one_d_warp(&self, what: &str) -> Result<WarpingFunction> {
        match self.warp.build()? {
            Warp::OneD(w) => Ok(w),
            Warp::Torus(_) => Err(invalid(format!("{what} needs a warp of one variable"))),
        }
    }

    pub fn rotational_profile(&self, domain: ReillyDomain) -> Result<RotationalProfile> {
        Ok(match domain {
            ReillyDomain::Disc { radius } => RotationalProfile::Disc { radius },
            ReillyDomain::Cylinder { length, radius } => RotationalProfile::Cylinder { length, radius },
            ReillyDomain::Warp { a, b } => RotationalProfile::Warped { warp: self.one_d_warp("a warped domain")?, a, b },
        })
    }
}
