//! Outlier scoring and iterative elimination.
//!
//! Four interchangeable strategies score every surviving point with a
//! removal criterion D and the elimination loop repeatedly drops the worst
//! point until none exceeds the threshold:
//!
//! * [`Strategy::Naive`] — D_k = |ε_k|/σ_k; ignores correlations. O(N) per pass.
//! * [`Strategy::BruteForce`] — physically deletes point k, reassembles and
//!   inverts the (N−1)×(N−1) covariance, refits, and takes
//!   D_k = √(χ² − χ²_k). O(N³) per point, O(N⁴) per pass.
//! * [`Strategy::Downdate`] — holds the residuals fixed, removes k from the
//!   known inverse by rank-one downdate, and re-evaluates the quadratic
//!   form. O(N²) per point, O(N³) per pass.
//! * [`Strategy::DeltaChi2`] — same fixed-residual criterion evaluated in
//!   closed form, D_k = |Σⱼ p(k,j)·εⱼ| / √p(k,k), so no inverse of the
//!   reduced matrix is ever formed. O(N) per point, O(N²) per pass.
//!
//! Downdate and DeltaChi2 are algebraically identical; BruteForce dominates
//! both pointwise because its per-candidate refit can only lower χ²_k.

use crate::covariance::CorrelationModel;
use crate::error::{Error, Result};
use crate::fit::{gls_fit, FitProblem, FitResult};
use crate::symmat::PrecisionMatrix;

/// Scoring strategy tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Naive,
    BruteForce,
    Downdate,
    DeltaChi2,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::Naive,
        Strategy::BruteForce,
        Strategy::Downdate,
        Strategy::DeltaChi2,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::Naive => "naive",
            Strategy::BruteForce => "brute-force",
            Strategy::Downdate => "downdate",
            Strategy::DeltaChi2 => "delta-chi2",
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "naive" => Ok(Strategy::Naive),
            "brute-force" => Ok(Strategy::BruteForce),
            "downdate" => Ok(Strategy::Downdate),
            "delta-chi2" => Ok(Strategy::DeltaChi2),
            other => Err(format!(
                "unknown strategy '{other}' (expected naive, brute-force, downdate, or delta-chi2)"
            )),
        }
    }
}

/// Removal score D for one point under one strategy. Always non-negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutlierScore {
    pub point: usize,
    pub value: f64,
    pub strategy: Strategy,
}

/// Configuration of the elimination loop.
#[derive(Debug, Clone, PartialEq)]
pub struct EliminationConfig {
    /// Threshold: points stay while D ≤ d_max. Must be positive.
    pub d_max: f64,
    pub strategy: Strategy,
    /// Refit after each removal; when off the first fit's residuals are
    /// retained for all later scoring passes.
    pub refit_each_iteration: bool,
    /// Cap on the number of removals; `None` means unlimited.
    pub max_removals: Option<usize>,
    /// Floor on surviving points; defaults to the parameter count and is
    /// never taken below it.
    pub min_surviving: Option<usize>,
}

impl Default for EliminationConfig {
    fn default() -> Self {
        Self {
            d_max: 3.0,
            strategy: Strategy::DeltaChi2,
            refit_each_iteration: false,
            max_removals: None,
            min_surviving: None,
        }
    }
}

/// One removal: which point, its score, and χ² on both sides of the cut.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub removed: usize,
    pub score: f64,
    pub chi2_before: f64,
    pub chi2_after: f64,
}

/// Full log of an elimination run.
#[derive(Debug, Clone)]
pub struct EliminationReport {
    pub initial_fit: FitResult,
    pub iterations: Vec<IterationRecord>,
    /// A fresh GLS fit over the surviving points, regardless of the refit
    /// policy used during the loop.
    pub final_fit: FitResult,
    pub surviving: Vec<usize>,
    /// Scores of all surviving points at the moment the loop stopped.
    pub scores_final: Vec<OutlierScore>,
}

/// D_k = |ε_k|/σ_k for every point.
pub fn naive_scores(residuals: &[f64], sigma: &[f64]) -> Result<Vec<OutlierScore>> {
    if residuals.len() != sigma.len() {
        return Err(Error::DimensionMismatch {
            expected: sigma.len(),
            got: residuals.len(),
        });
    }
    residuals
        .iter()
        .zip(sigma)
        .enumerate()
        .map(|(point, (&eps, &s))| {
            if s <= 0.0 || s.is_nan() {
                return Err(Error::NonPositiveSigma {
                    index: point,
                    value: s,
                });
            }
            Ok(OutlierScore {
                point,
                value: eps.abs() / s,
                strategy: Strategy::Naive,
            })
        })
        .collect()
}

/// Retained-fit score for point k in closed form:
/// D_k = |Σⱼ p(k,j)·εⱼ| / √p(k,k), which equals √(χ² − χ²_k) without ever
/// forming the inverse of the reduced covariance.
pub fn delta_chi2_score(
    precision: &PrecisionMatrix,
    residuals: &[f64],
    k: usize,
) -> Result<OutlierScore> {
    if precision.is_removed(k) {
        return Err(Error::PointAlreadyRemoved { point: k });
    }
    let pivot = precision.get(k, k);
    if pivot <= precision.as_matrix().pivot_tolerance() {
        return Err(Error::DegeneratePivot {
            point: k,
            value: pivot,
        });
    }
    let weighted = precision.row_dot(k, residuals)?;
    Ok(OutlierScore {
        point: k,
        value: weighted.abs() / pivot.sqrt(),
        strategy: Strategy::DeltaChi2,
    })
}

/// Retained-fit scores for all surviving points in one O(N²) pass.
pub fn delta_chi2_scores(
    precision: &PrecisionMatrix,
    residuals: &[f64],
) -> Result<Vec<OutlierScore>> {
    let weighted = precision.mul_vec(residuals)?;
    let tolerance = precision.as_matrix().pivot_tolerance();
    precision
        .surviving()
        .map(|k| {
            let pivot = precision.get(k, k);
            if pivot <= tolerance {
                return Err(Error::DegeneratePivot {
                    point: k,
                    value: pivot,
                });
            }
            Ok(OutlierScore {
                point: k,
                value: weighted[k].abs() / pivot.sqrt(),
                strategy: Strategy::DeltaChi2,
            })
        })
        .collect()
}

/// Retained-fit scores computed the long way: downdate the precision matrix
/// for each candidate and re-evaluate χ². O(N³) per full pass.
pub fn downdate_scores(
    precision: &PrecisionMatrix,
    residuals: &[f64],
) -> Result<Vec<OutlierScore>> {
    let chi2 = precision.quadratic_form(residuals)?;
    precision
        .surviving()
        .map(|k| {
            let reduced = precision.downdate(k)?;
            let chi2_k = reduced.quadratic_form(residuals)?;
            Ok(OutlierScore {
                point: k,
                value: (chi2 - chi2_k).max(0.0).sqrt(),
                strategy: Strategy::Downdate,
            })
        })
        .collect()
}

/// Brute-force score for point k: physically delete the point, reassemble
/// and invert the reduced covariance, refit, and take D_k = √(χ² − χ²_k).
pub fn brute_force_score(
    problem: &FitProblem,
    model: &CorrelationModel,
    k: usize,
) -> Result<OutlierScore> {
    let baseline = gls_fit(problem)?;
    brute_force_score_with_baseline(problem, model, k, baseline.chi2)
}

/// Brute-force scores for all surviving points. O(N⁴) per full pass.
pub fn brute_force_scores(
    problem: &FitProblem,
    model: &CorrelationModel,
) -> Result<Vec<OutlierScore>> {
    let baseline = gls_fit(problem)?;
    problem
        .precision()
        .surviving()
        .map(|k| brute_force_score_with_baseline(problem, model, k, baseline.chi2))
        .collect()
}

fn brute_force_score_with_baseline(
    problem: &FitProblem,
    model: &CorrelationModel,
    k: usize,
    chi2: f64,
) -> Result<OutlierScore> {
    if model.len() != problem.precision().dim() {
        return Err(Error::DimensionMismatch {
            expected: problem.precision().dim(),
            got: model.len(),
        });
    }
    if problem.precision().is_removed(k) {
        return Err(Error::PointAlreadyRemoved { point: k });
    }
    let keep: Vec<usize> = problem
        .precision()
        .surviving()
        .filter(|&i| i != k)
        .collect();
    let refit = refit_over_points(problem, model, &keep)?;
    Ok(OutlierScore {
        point: k,
        value: (chi2 - refit.chi2).max(0.0).sqrt(),
        strategy: Strategy::BruteForce,
    })
}

/// Fits the physically reduced problem over the listed points.
fn refit_over_points(
    problem: &FitProblem,
    model: &CorrelationModel,
    keep: &[usize],
) -> Result<FitResult> {
    let p = problem.num_parameters();
    if keep.len() < p {
        return Err(Error::TooFewPoints {
            surviving: keep.len(),
            required: p,
        });
    }
    let sub_model = model.select_points(keep);
    let precision = sub_model.assemble_covariance().invert()?;
    let design = problem.design().select_rows(keep);
    let observations: Vec<f64> = keep.iter().map(|&i| problem.observations()[i]).collect();
    gls_fit(&FitProblem::new(design, observations, precision)?)
}

/// Iterative elimination: score all surviving points, remove the argmax
/// while it exceeds `d_max` (ties broken toward the lowest index), downdate
/// the precision matrix, optionally refit, and repeat.
///
/// Stops normally when no score exceeds `d_max` or the removal cap is
/// reached. Fails with [`Error::TooFewPoints`] if the surviving floor would
/// have to be violated while scores above `d_max` remain.
pub fn eliminate(
    problem: &FitProblem,
    model: &CorrelationModel,
    config: &EliminationConfig,
) -> Result<EliminationReport> {
    assert!(config.d_max > 0.0, "d_max must be positive");
    if model.len() != problem.precision().dim() {
        return Err(Error::DimensionMismatch {
            expected: problem.precision().dim(),
            got: model.len(),
        });
    }
    let p = problem.num_parameters();
    let min_surviving = config.min_surviving.unwrap_or(p).max(p);
    let max_removals = config.max_removals.unwrap_or(usize::MAX);

    let mut problem = problem.clone();
    let initial_fit = gls_fit(&problem)?;
    let mut residuals = initial_fit.residuals.clone();
    let mut chi2 = initial_fit.chi2;
    let mut iterations: Vec<IterationRecord> = Vec::new();

    let scores_final = loop {
        let scores = strategy_scores(config.strategy, &problem, model, &residuals)?;
        let worst = scores
            .iter()
            .fold(None::<OutlierScore>, |best, s| match best {
                Some(b) if s.value <= b.value => Some(b),
                _ => Some(*s),
            });
        let worst = match worst {
            Some(w) if w.value > config.d_max => w,
            _ => break scores,
        };
        if iterations.len() >= max_removals {
            break scores;
        }
        if problem.precision().surviving_count() <= min_surviving {
            return Err(Error::TooFewPoints {
                surviving: problem.precision().surviving_count(),
                required: min_surviving + 1,
            });
        }

        let chi2_before = chi2;
        problem.precision_mut().downdate_in_place(worst.point)?;
        if config.refit_each_iteration {
            let fit = gls_fit(&problem)?;
            residuals = fit.residuals.clone();
            chi2 = fit.chi2;
        } else {
            // Residuals retained from the first fit; only the precision
            // matrix knows about the removal.
            chi2 = problem.precision().quadratic_form(&residuals)?;
        }
        iterations.push(IterationRecord {
            removed: worst.point,
            score: worst.value,
            chi2_before,
            chi2_after: chi2,
        });
    };

    let final_fit = gls_fit(&problem)?;
    let surviving = problem.precision().surviving().collect();
    Ok(EliminationReport {
        initial_fit,
        iterations,
        final_fit,
        surviving,
        scores_final,
    })
}

fn strategy_scores(
    strategy: Strategy,
    problem: &FitProblem,
    model: &CorrelationModel,
    residuals: &[f64],
) -> Result<Vec<OutlierScore>> {
    match strategy {
        Strategy::Naive => {
            let all = naive_scores(residuals, model.sigma())?;
            Ok(all
                .into_iter()
                .filter(|s| !problem.precision().is_removed(s.point))
                .collect())
        }
        Strategy::DeltaChi2 => delta_chi2_scores(problem.precision(), residuals),
        Strategy::Downdate => downdate_scores(problem.precision(), residuals),
        Strategy::BruteForce => brute_force_scores(problem, model),
    }
}
