use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("point lies outside the domain (or within the boundary margin)")]
    PointOutsideDomain,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite entry in input data")]
    NonFiniteInput,

    #[error("trajectory escaped the domain at t = {t_esc}")]
    TrajectoryEscaped { t_esc: f64 },

    #[error("adaptive step control could not meet tolerance at t = {t}")]
    StepFailure { t: f64 },

    #[error("callback field evaluation failed: {0}")]
    CallbackFailure(String),

    #[error("pair is degenerate: kobayashi distance below 1e-9")]
    DegeneratePair,

    #[error("evaluation time {s} exceeds chain horizon {horizon}")]
    HorizonExceeded { s: f64, horizon: f64 },

    #[error("grid point s = {s} is within the difference step of a field breakpoint")]
    BreakpointTooClose { s: f64 },

    #[error("target point is within 1e-9 of the traced curve")]
    CurveTooClose,

    #[error("winding integral {value} is not within 0.2 of an integer; sampling too coarse")]
    NonIntegerWinding { value: f64 },

    #[error("newton iteration diverged for target #{index} in sequence member {k}")]
    NewtonDivergence { index: usize, k: usize },

    #[error("square-root branch continuation failed: |f'| < 1e-12 on the path")]
    BranchContinuationFailure,

    #[error("lifted map left the unit ball: norm = {norm}")]
    SchwarzPickViolation { norm: f64 },

    #[error("jacobian is numerically singular at a probe point")]
    SingularJacobian,

    #[error("beta probe did not converge within the time horizon")]
    NotConverged,

    #[error("classification inconclusive: {0}")]
    Inconclusive(String),

    #[error("invalid spec: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
