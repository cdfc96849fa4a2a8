use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use covfit::Strategy;
use covfit_cli::{benchmark_strategies, render_table, run_fit, Dataset, RunConfig};

#[derive(Parser)]
#[command(
    name = "covfit",
    version,
    about = "Correlated least-squares fitting with iterative outlier elimination"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a dataset, eliminate outliers, and emit a JSON report
    Fit {
        /// Points file: header `id,y,sigma,x0,..`, one data point per row
        points: PathBuf,
        /// Correlation file: header `du`, a delta_u row, then N Jacobian rows
        #[arg(long)]
        correlations: Option<PathBuf>,
        /// Outlier scoring strategy
        #[arg(long, value_enum, default_value_t = StrategyArg::DeltaChi2)]
        strategy: StrategyArg,
        /// Removal threshold D_max
        #[arg(long = "dmax", default_value_t = 3.0)]
        dmax: f64,
        /// Refit after every removal instead of retaining the first fit
        #[arg(long = "refit-each")]
        refit_each: bool,
        /// Cap on the number of removals
        #[arg(long)]
        max_removals: Option<usize>,
        /// Write the report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time one full scoring pass per strategy across problem sizes
    Bench {
        /// Ascending problem sizes, e.g. 64,128,256,512
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        /// Seed for the synthetic data generator
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Strategies to time (default: delta-chi2,downdate,brute-force)
        #[arg(long, value_enum, value_delimiter = ',')]
        strategies: Option<Vec<StrategyArg>>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyArg {
    Naive,
    BruteForce,
    Downdate,
    DeltaChi2,
}

impl From<StrategyArg> for Strategy {
    fn from(arg: StrategyArg) -> Strategy {
        match arg {
            StrategyArg::Naive => Strategy::Naive,
            StrategyArg::BruteForce => Strategy::BruteForce,
            StrategyArg::Downdate => Strategy::Downdate,
            StrategyArg::DeltaChi2 => Strategy::DeltaChi2,
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    match cli.command {
        Command::Fit {
            points,
            correlations,
            strategy,
            dmax,
            refit_each,
            max_removals,
            out,
        } => {
            let dataset = Dataset::load(&points, correlations.as_deref())?;
            let config = RunConfig {
                strategy: strategy.into(),
                d_max: dmax,
                refit_each_iteration: refit_each,
                max_removals,
                seed: 0,
            };
            let report = run_fit(&dataset, &config)?;
            let json = report.to_json();
            match out {
                Some(path) => std::fs::write(&path, json)
                    .map_err(|e| format!("failed to write {}: {e}", path.display()))?,
                None => print!("{json}"),
            }
            Ok(())
        }
        Command::Bench {
            sizes,
            seed,
            strategies,
        } => {
            let strategies: Vec<Strategy> = strategies
                .map(|list| list.into_iter().map(Strategy::from).collect())
                .unwrap_or_else(|| {
                    vec![
                        Strategy::DeltaChi2,
                        Strategy::Downdate,
                        Strategy::BruteForce,
                    ]
                });
            let config = RunConfig {
                seed,
                ..RunConfig::default()
            };
            let report = benchmark_strategies(&sizes, &strategies, &config)?;
            print!("{}", render_table(&report));
            Ok(())
        }
    }
}
