//! End-to-end fit-and-eliminate driver.

use covfit::{eliminate, EliminationConfig, FitProblem, Strategy};

use crate::dataset::Dataset;
use crate::error::{engine_error, CliError};
use crate::report::Report;

/// Run configuration shared by `fit` and `bench`. The seed only matters for
/// synthetic benchmark data.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub strategy: Strategy,
    pub d_max: f64,
    pub refit_each_iteration: bool,
    pub max_removals: Option<usize>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            strategy: Strategy::DeltaChi2,
            d_max: 3.0,
            refit_each_iteration: false,
            max_removals: None,
            seed: 0,
        }
    }
}

/// Assembles the covariance from the dataset, fits, eliminates outliers per
/// the configured strategy, and returns the serialized-ready report.
pub fn run_fit(dataset: &Dataset, config: &RunConfig) -> Result<Report, CliError> {
    if config.d_max <= 0.0 || config.d_max.is_nan() {
        return Err(CliError::InvalidArgs(format!(
            "dmax must be positive, got {}",
            config.d_max
        )));
    }
    let model = dataset.correlation_model()?;
    let precision = model
        .assemble_covariance()
        .invert()
        .map_err(|e| engine_error(e, dataset))?;
    let problem = FitProblem::new(dataset.design_matrix(), dataset.observations(), precision)
        .map_err(|e| engine_error(e, dataset))?;
    let elimination = EliminationConfig {
        d_max: config.d_max,
        strategy: config.strategy,
        refit_each_iteration: config.refit_each_iteration,
        max_removals: config.max_removals,
        min_surviving: None,
    };
    let outcome =
        eliminate(&problem, &model, &elimination).map_err(|e| engine_error(e, dataset))?;
    Ok(Report::from_elimination(dataset, config, &outcome))
}
