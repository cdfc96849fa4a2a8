use thiserror::Error;

use crate::dataset::Dataset;

/// Errors surfaced to the command line. File errors carry the path and
/// 1-based line number; engine errors name points by id, not index.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}: parse error: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{path}:{line}: invalid data: {message}")]
    Validation {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{path}: dimension mismatch: {message}")]
    DimensionMismatch { path: String, message: String },

    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("invalid arguments: {0}")]
    InvalidArgs(String),

    #[error("{0}")]
    Engine(String),
}

/// Wraps a core error, replacing point indices with dataset ids.
pub fn engine_error(err: covfit::Error, dataset: &Dataset) -> CliError {
    use covfit::Error;
    let id = |index: usize| {
        dataset
            .points
            .get(index)
            .map_or_else(|| format!("#{index}"), |p| format!("'{}'", p.id))
    };
    let message = match &err {
        Error::DegeneratePivot { point, .. } | Error::PointAlreadyRemoved { point } => {
            format!("point {}: {err}", id(*point))
        }
        Error::NonPositiveSigma { index, .. } => format!("point {}: {err}", id(*index)),
        Error::SingularMatrix { pivot, .. } | Error::NotPositiveDefinite { pivot, .. } => {
            format!("covariance matrix at point {}: {err}", id(*pivot))
        }
        _ => err.to_string(),
    };
    CliError::Engine(message)
}
