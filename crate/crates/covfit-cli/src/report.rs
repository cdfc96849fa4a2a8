//! Machine-readable elimination reports.
//!
//! A report is a single JSON object with keys `config`, `initial_fit`,
//! `iterations`, `final_fit`, and `surviving`. Every real number is written
//! with 17 significant digits so parsing the document back reproduces each
//! value bit for bit.

use serde::{Deserialize, Serialize};

use covfit::{EliminationReport, FitResult};

use crate::dataset::Dataset;
use crate::run::RunConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: ReportConfig,
    pub initial_fit: FitSummary,
    pub iterations: Vec<IterationEntry>,
    pub final_fit: FitSummary,
    pub surviving: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub strategy: String,
    pub d_max: f64,
    pub refit_each_iteration: bool,
    pub max_removals: Option<usize>,
    pub min_surviving: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub parameters: Vec<f64>,
    pub chi2: f64,
    pub dof: usize,
    pub residuals: Vec<f64>,
    pub parameter_covariance: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationEntry {
    pub removed: String,
    pub index: usize,
    pub score: f64,
    pub chi2_before: f64,
    pub chi2_after: f64,
}

impl FitSummary {
    fn from_fit(fit: &FitResult) -> Self {
        let p = fit.parameters.len();
        Self {
            parameters: fit.parameters.clone(),
            chi2: fit.chi2,
            dof: fit.dof,
            residuals: fit.residuals.clone(),
            parameter_covariance: (0..p)
                .map(|a| (0..p).map(|b| fit.parameter_covariance.get(a, b)).collect())
                .collect(),
        }
    }
}

impl Report {
    pub fn from_elimination(
        dataset: &Dataset,
        config: &RunConfig,
        outcome: &EliminationReport,
    ) -> Self {
        Report {
            config: ReportConfig {
                strategy: config.strategy.as_str().to_string(),
                d_max: config.d_max,
                refit_each_iteration: config.refit_each_iteration,
                max_removals: config.max_removals,
                min_surviving: dataset.num_parameters(),
            },
            initial_fit: FitSummary::from_fit(&outcome.initial_fit),
            iterations: outcome
                .iterations
                .iter()
                .map(|it| IterationEntry {
                    removed: dataset.id(it.removed).to_string(),
                    index: it.removed,
                    score: it.score,
                    chi2_before: it.chi2_before,
                    chi2_after: it.chi2_after,
                })
                .collect(),
            final_fit: FitSummary::from_fit(&outcome.final_fit),
            surviving: outcome
                .surviving
                .iter()
                .map(|&i| dataset.id(i).to_string())
                .collect(),
        }
    }

    /// Serializes with 17-significant-digit reals; see [`to_json`].
    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Pretty JSON whose `f64` values carry 17 significant digits, enough for a
/// lossless parse round-trip.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut serializer = serde_json::Serializer::with_formatter(&mut out, SigFig17::new());
    value
        .serialize(&mut serializer)
        .expect("report serialization cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("serializer emits UTF-8")
}

/// Pretty formatter overriding only how finite `f64` values are printed.
struct SigFig17 {
    inner: serde_json::ser::PrettyFormatter<'static>,
}

impl SigFig17 {
    fn new() -> Self {
        Self {
            inner: serde_json::ser::PrettyFormatter::new(),
        }
    }
}

impl serde_json::ser::Formatter for SigFig17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.begin_array(writer)
    }

    fn end_array<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W>(&mut self, writer: &mut W, first: bool) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.begin_object(writer)
    }

    fn end_object<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W>(&mut self, writer: &mut W, first: bool) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.end_object_value(writer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Sample {
        values: Vec<f64>,
    }

    #[test]
    fn reals_round_trip_bit_exactly() {
        let sample = Sample {
            values: vec![
                2.0 / 3.0,
                1.0e-300,
                -0.1,
                4.5,
                f64::MIN_POSITIVE,
                123456789.987654,
            ],
        };
        let text = to_json(&sample);
        let parsed: Sample = serde_json::from_str(&text).unwrap();
        for (a, b) in sample.values.iter().zip(&parsed.values) {
            assert_eq!(a.to_bits(), b.to_bits(), "{a} reparsed as {b}");
        }
    }

    #[test]
    fn reals_carry_seventeen_significant_digits() {
        let text = to_json(&Sample {
            values: vec![2.0 / 3.0],
        });
        assert!(text.contains("6.6666666666666663e-1"), "{text}");
    }
}
