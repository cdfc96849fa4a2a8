use thiserror::Error;

/// Errors produced by the fitting and elimination kernels.
///
/// Variants that refer to a point or pivot carry its index so callers can
/// map it back to their own identifiers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is singular: |pivot {pivot}| <= tolerance {tolerance:e}")]
    SingularMatrix { pivot: usize, tolerance: f64 },

    #[error("matrix is not positive definite: pivot {pivot} = {value}")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error(
        "degenerate pivot for point {point}: diagonal entry {value:e} is at or below tolerance"
    )]
    DegeneratePivot { point: usize, value: f64 },

    #[error("point {point} has already been removed")]
    PointAlreadyRemoved { point: usize },

    #[error("sigma[{index}] = {value} must be strictly positive")]
    NonPositiveSigma { index: usize, value: f64 },

    #[error("delta_u[{index}] = {value} must be non-negative")]
    NegativeDeltaU { index: usize, value: f64 },

    #[error("design matrix is rank deficient over the surviving points")]
    RankDeficientDesign,

    #[error("too few surviving points: {surviving} left, {required} required")]
    TooFewPoints { surviving: usize, required: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
