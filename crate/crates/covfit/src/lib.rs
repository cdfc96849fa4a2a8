//! Generalized least-squares fitting with correlated uncertainties and fast
//! outlier elimination.
//!
//! Data points share correlation parameters whose uncertainties generate a
//! dense covariance matrix V; a linear model is fitted by minimizing
//! χ² = εᵀ·V⁻¹·ε. Outliers are then removed iteratively under a per-point
//! criterion D with interchangeable scoring strategies, from the naive
//! |ε_k|/σ_k through a physically-refitting brute force (O(N⁴) per pass),
//! a rank-one inverse downdate (O(N³)), and a closed-form retained-fit
//! χ²-difference that needs no reduced inverse at all (O(N²)).
//!
//! The strategies are mutually verifiable: downdate and delta-chi2 agree
//! algebraically, both collapse to the naive criterion when correlations
//! vanish, and brute force bounds them from above.

mod covariance;
mod error;
mod fit;
mod matrix;
mod outlier;
mod symmat;

pub use covariance::CorrelationModel;
pub use error::{Error, Result};
pub use fit::{chi_squared, gls_fit, FitProblem, FitResult};
pub use matrix::Matrix;
pub use outlier::{
    brute_force_score, brute_force_scores, delta_chi2_score, delta_chi2_scores, downdate_scores,
    eliminate, naive_scores, EliminationConfig, EliminationReport, IterationRecord, OutlierScore,
    Strategy,
};
pub use symmat::{Ldlt, PrecisionMatrix, SymmetricMatrix};
