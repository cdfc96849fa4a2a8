//! File ingestion, reporting, and benchmarking around the covfit kernels.
//!
//! The binary exposes two subcommands: `fit` runs the full
//! fit-and-eliminate pipeline on CSV inputs and emits a JSON report;
//! `bench` times one full scoring pass per strategy across problem sizes
//! and fits the log-log scaling slope.

pub mod bench;
pub mod dataset;
pub mod error;
pub mod report;
pub mod run;
pub mod synth;

pub use bench::{benchmark, benchmark_strategies, render_table, BenchReport, BenchRow};
pub use dataset::{DataPoint, Dataset};
pub use error::CliError;
pub use report::{to_json, FitSummary, IterationEntry, Report, ReportConfig};
pub use run::{run_fit, RunConfig};
pub use synth::{synthetic_instance, SyntheticInstance};
