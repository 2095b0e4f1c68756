//! Crate-wide error type.

/// Errors raised by the reduction, counting, spectral and grid layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{0} requires an attractive coupling (eta < 0), got eta = {1}")]
    RequiresAttractive(&'static str, f64),

    #[error("point is off-branch: |f(z, eta)| = {residual:.3e} at z = {z}, eta = {eta}")]
    OffBranch { z: f64, eta: f64, residual: f64 },

    #[error("undetermined at a critical coupling: {0}")]
    UndeterminedBoundary(String),

    #[error("slope is singular at the saddle imbalance (h(z) = 0 with z != 0)")]
    SaddleSingular,

    #[error("requested eigenvalue does not exist: {0}")]
    MissingEigenvalue(String),

    #[error("resolvent evaluated within 1e-10 of the eigenvalue {0}")]
    ResolventPole(f64),

    #[error("trajectory left the (theta, z) chart: |z| reached {0}")]
    ChartBlowThrough(f64),

    #[error("oracle inconsistency: {0}")]
    OracleInconsistency(String),

    #[error("eigensolver failure: {0}")]
    Eigensolver(String),

    #[error("fewer than two bound states resolve below the essential spectrum edge")]
    DoubletMissing,

    #[error("coupling constant must be positive, got {0}")]
    NonpositiveCoupling(f64),

    #[error("fixed-point map is not a contraction (difference ratio {0:.3})")]
    NonContraction(f64),

    #[error("Newton iteration did not converge after {steps} damped steps (residual {residual:.3e})")]
    NoConvergence { steps: usize, residual: f64 },

    #[error("lambda is not monotone along the branch (fold detected)")]
    NonMonotoneBranch,

    #[error("unsupported branch for this operation: {0}")]
    UnsupportedBranch(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
