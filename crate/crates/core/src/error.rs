use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Hypothesis failures of the theorems (symmetry, parameter range) are not
/// errors; they surface as `unsupported` reports.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("alpha = {alpha} must exceed -N = -{dim}")]
    AlphaOutOfRange { alpha: f64, dim: usize },

    #[error("dimension {0} is below 2")]
    DimTooSmall(usize),

    #[error("dimension {0} is not supported by this operation (planar only)")]
    DimensionUnsupported(usize),

    #[error("weight with negative exponent {exponent} evaluated at the origin")]
    SingularEvaluation { exponent: f64 },

    #[error("radius {r} lies outside the weight horizon [0, {r_max}]")]
    OutsideHorizon { r: f64, r_max: f64 },

    #[error("f has no root in [-rho/3, 0] (f(-rho/3) = {f_left} >= 0)")]
    NoRootInBracket { f_left: f64 },

    #[error("ell = {ell} must exceed -N = -{dim}")]
    EllOutOfRange { ell: f64, dim: usize },

    #[error("radial ODE integration failed: {0}")]
    IntegrationFailure(String),

    #[error("weight is not non-decreasing and log-convex: {0}")]
    WeightInvalid(String),

    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),

    #[error("|x|^ell is not integrable near the origin for ell = {ell}")]
    IntegrabilityViolation { ell: f64 },

    #[error("the origin lies on the boundary (distance {distance:e})")]
    OriginOnBoundary { distance: f64 },

    #[error("root finding failed: {0}")]
    RootFindFailure(String),

    #[error("monotonicity condition violated at r = {r}")]
    MonotoneCondViolated { r: f64 },

    #[error("mesh generation failed: {0}")]
    MeshFailure(String),

    #[error("factorization failed: {0}")]
    FactorizationFailure(String),

    #[error("trivial eigenmode check failed: {0}")]
    TrivialModeMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
