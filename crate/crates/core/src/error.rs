use thiserror::Error;

/// Errors raised by the geometry, quadrature and spectral routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("warping function is not positive: f({t}) = {value}")]
    NonPositiveWarp { t: f64, value: f64 },

    #[error("t = {t} lies outside the interval [{a}, {b}]")]
    DomainError { t: f64, a: f64, b: f64 },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("expression parse error at column {column}: {message}")]
    ExpressionParse { column: usize, message: String },

    #[error("expression evaluation failed: {0}")]
    ExpressionEval(String),

    #[error("unknown catalog entry `{0}`")]
    UnknownCatalog(String),

    #[error("horizon reached: 1 - 2m/f^q = {value} at t = {t}")]
    HorizonError { t: f64, value: f64 },

    #[error("quadrature did not converge: last change {last_change:e} after {nodes} nodes")]
    NonConvergence { nodes: usize, last_change: f64 },

    #[error("iterative solver did not converge: {0}")]
    NoConvergence(String),

    #[error("hypersurfaces are tangent at the intersection (sin phi = {sin_phi:e})")]
    TangencyError { sin_phi: f64 },

    #[error("fiber has no known spectrum")]
    MissingSpectrum,

    #[error("test function is degenerate: integral of cos^2 = {0:e}")]
    DegenerateTestFunction(f64),

    #[error("boundary mean curvature is not positive (min H = {0})")]
    NonpositiveMeanCurvature(f64),

    #[error("scenario parse error at line {line}, column {column}: {message}")]
    ScenarioParse { line: usize, column: usize, message: String },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, LabError>;

impl LabError {
    /// Process exit code: 2 for malformed input, 3 for non-convergence, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::NonConvergence { .. } | LabError::NoConvergence(_) => 3,
            LabError::ScenarioParse { .. }
            | LabError::InvalidScenario(_)
            | LabError::ExpressionParse { .. }
            | LabError::UnknownCatalog(_)
            | LabError::InvalidDomain(_)
            | LabError::MissingSpectrum
            | LabError::Precondition(_) => 2,
            _ => 1,
        }
    }
}
