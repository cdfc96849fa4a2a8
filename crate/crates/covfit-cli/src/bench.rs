//! Wall-time measurement of one full scoring pass per strategy and size,
//! plus the fitted log-log slope that exposes each strategy's scaling
//! exponent.

use std::hint::black_box;
use std::time::Instant;

use covfit::{
    brute_force_scores, delta_chi2_scores, downdate_scores, gls_fit, naive_scores, FitProblem,
    Strategy,
};

use crate::error::CliError;
use crate::run::RunConfig;
use crate::synth::synthetic_instance;

/// Measured wall time of one scoring pass.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub strategy: Strategy,
    pub size: usize,
    pub seconds: f64,
    pub passes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Least-squares slope of ln(time) against ln(N) per strategy; absent
    /// when fewer than two sizes were run.
    pub slopes: Vec<(Strategy, f64)>,
}

/// Times one full scoring pass of `config.strategy` at each size.
pub fn benchmark(sizes: &[usize], config: &RunConfig) -> Result<BenchReport, CliError> {
    if sizes.is_empty() {
        return Err(CliError::InvalidArgs("no benchmark sizes given".into()));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::InvalidArgs(
            "benchmark sizes must be strictly ascending".into(),
        ));
    }
    let mut rows = Vec::new();
    for &n in sizes {
        let (seconds, passes) = time_scoring_pass(n, config)?;
        rows.push(BenchRow {
            strategy: config.strategy,
            size: n,
            seconds,
            passes,
        });
    }
    let slopes = if rows.len() >= 2 {
        let points: Vec<(f64, f64)> = rows
            .iter()
            .map(|r| ((r.size as f64).ln(), r.seconds.ln()))
            .collect();
        vec![(config.strategy, least_squares_slope(&points))]
    } else {
        Vec::new()
    };
    Ok(BenchReport { rows, slopes })
}

/// Convenience wrapper running several strategies over the same sizes.
pub fn benchmark_strategies(
    sizes: &[usize],
    strategies: &[Strategy],
    config: &RunConfig,
) -> Result<BenchReport, CliError> {
    let mut rows = Vec::new();
    let mut slopes = Vec::new();
    for &strategy in strategies {
        let one = benchmark(
            sizes,
            &RunConfig {
                strategy,
                ..config.clone()
            },
        )?;
        rows.extend(one.rows);
        slopes.extend(one.slopes);
    }
    Ok(BenchReport { rows, slopes })
}

fn time_scoring_pass(n: usize, config: &RunConfig) -> Result<(f64, usize), CliError> {
    let instance = synthetic_instance(n, config.seed);
    let precision = instance
        .model
        .assemble_covariance()
        .invert()
        .map_err(|e| CliError::Engine(e.to_string()))?;
    let problem = FitProblem::new(instance.design, instance.observations, precision)
        .map_err(|e| CliError::Engine(e.to_string()))?;
    let fit = gls_fit(&problem).map_err(|e| CliError::Engine(e.to_string()))?;
    let residuals = fit.residuals;
    let model = instance.model;

    let pass: Box<dyn Fn()> = match config.strategy {
        Strategy::Naive => Box::new(|| {
            black_box(naive_scores(black_box(&residuals), model.sigma()).unwrap());
        }),
        Strategy::DeltaChi2 => Box::new(|| {
            black_box(delta_chi2_scores(black_box(problem.precision()), &residuals).unwrap());
        }),
        Strategy::Downdate => Box::new(|| {
            black_box(downdate_scores(black_box(problem.precision()), &residuals).unwrap());
        }),
        Strategy::BruteForce => Box::new(|| {
            black_box(brute_force_scores(black_box(&problem), &model).unwrap());
        }),
    };
    Ok(measure(&*pass))
}

/// Best pass time: repeats until 0.25 s accumulates (or 10 000 passes),
/// measuring at least three passes after a warmup. The minimum is the
/// robust estimator here since interference only ever adds time.
fn measure(pass: &dyn Fn()) -> (f64, usize) {
    pass();
    let mut best = f64::INFINITY;
    let mut total = 0.0;
    let mut passes = 0;
    while passes < 3 || (total < 0.25 && passes < 10_000) {
        let start = Instant::now();
        pass();
        let dt = start.elapsed().as_secs_f64();
        best = best.min(dt);
        total += dt;
        passes += 1;
    }
    (best, passes)
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Plain-text table for terminal output.
pub fn render_table(report: &BenchReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<12} {:>6} {:>14} {:>8}\n",
        "strategy", "N", "seconds/pass", "passes"
    ));
    for row in &report.rows {
        out.push_str(&format!(
            "{:<12} {:>6} {:>14.6e} {:>8}\n",
            row.strategy.as_str(),
            row.size,
            row.seconds,
            row.passes
        ));
    }
    for (strategy, slope) in &report.slopes {
        out.push_str(&format!(
            "log-log slope {:<12} {:+.3}\n",
            strategy.as_str(),
            slope
        ));
    }
    out
}
