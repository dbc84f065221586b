use thiserror::Error;

/// Errors raised by the geometric routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("cannot project onto the hyperquadric: {0}")]
    Projection(String),

    #[error("invalid umbilical surface: {0}")]
    InvalidSurface(String),

    #[error("point is not on the surface (residual {residual:.3e})")]
    NotOnSurface { residual: f64 },

    #[error("point lies outside the upper half-space chart (x3 + x4 = {0:.3e})")]
    OutOfChart(f64),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("finite-difference stencil unavailable: {0}")]
    Stencil(String),

    #[error("curvature below {kappa_min:e} at samples {first}..={last} (geodesic point)")]
    GeodesicPoint {
        first: usize,
        last: usize,
        kappa_min: f64,
    },

    #[error("invariant undefined: {0}")]
    UndefinedInvariant(String),

    #[error("surface recovery failed: {0}")]
    Recovery(String),

    #[error("parameter outside the admissible domain: {0}")]
    Domain(String),

    #[error("integration aborted at s = {s:.6}: {reason}")]
    Integration { s: f64, reason: String },

    #[error("ambiguous linear relation: {0} near-zero singular values")]
    AmbiguousRelation(usize),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, GeomError>;
