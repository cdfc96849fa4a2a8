//! Plain-text dataset ingestion.
//!
//! Two comma-separated files describe a problem:
//!
//! * points file — header `id,y,sigma,x0,..,x{P-1}`, one data point per row;
//! * optional correlation file — header line `du`, a first data row holding
//!   δu_1..δu_K, then N Jacobian rows J(i,1..K) aligned with points order.
//!
//! Parsing is locale-independent (`.` decimal separator); blank lines are
//! skipped and errors carry 1-based file line numbers.

use std::path::Path;

use covfit::{CorrelationModel, Matrix};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct DataPoint {
    pub id: String,
    pub y: f64,
    pub sigma: f64,
    pub design: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub points: Vec<DataPoint>,
    pub jacobian: Option<Matrix>,
    pub delta_u: Option<Vec<f64>>,
}

impl Dataset {
    pub fn load(points_path: &Path, correlations_path: Option<&Path>) -> Result<Self, CliError> {
        let text = read(points_path)?;
        let mut dataset = Self::parse_points(&text, &points_path.display().to_string())?;
        if let Some(path) = correlations_path {
            let text = read(path)?;
            dataset.apply_correlations(&text, &path.display().to_string())?;
        }
        Ok(dataset)
    }

    /// Parses the points file. `source` labels error messages.
    pub fn parse_points(text: &str, source: &str) -> Result<Self, CliError> {
        let mut lines = numbered_lines(text);
        let (header_line, header) = lines
            .next()
            .ok_or_else(|| validation(source, 1, "empty file"))?;
        let fields = split(header);
        if fields.len() < 4 || fields[0] != "id" || fields[1] != "y" || fields[2] != "sigma" {
            return Err(validation(
                source,
                header_line,
                "header must be 'id,y,sigma,x0,..'",
            ));
        }
        for (a, name) in fields[3..].iter().enumerate() {
            if *name != format!("x{a}") {
                return Err(validation(
                    source,
                    header_line,
                    &format!("design column {a} must be named 'x{a}', found '{name}'"),
                ));
            }
        }
        let p = fields.len() - 3;

        let mut points: Vec<DataPoint> = Vec::new();
        let mut last_line = header_line;
        for (line, row) in lines {
            last_line = line;
            let fields = split(row);
            if fields.len() != 3 + p {
                return Err(validation(
                    source,
                    line,
                    &format!("expected {} fields, found {}", 3 + p, fields.len()),
                ));
            }
            let id = fields[0].to_string();
            if points.iter().any(|pt| pt.id == id) {
                return Err(validation(source, line, &format!("duplicate id '{id}'")));
            }
            let y = parse_real(source, line, "y", fields[1])?;
            let sigma = parse_real(source, line, "sigma", fields[2])?;
            if sigma <= 0.0 || sigma.is_nan() {
                return Err(validation(
                    source,
                    line,
                    &format!("sigma must be positive, found {sigma}"),
                ));
            }
            let design = fields[3..]
                .iter()
                .enumerate()
                .map(|(a, f)| parse_real(source, line, &format!("x{a}"), f))
                .collect::<Result<Vec<f64>, _>>()?;
            points.push(DataPoint {
                id,
                y,
                sigma,
                design,
            });
        }
        if points.is_empty() {
            return Err(validation(source, last_line, "no data points"));
        }
        Ok(Dataset {
            points,
            jacobian: None,
            delta_u: None,
        })
    }

    /// Parses and attaches the correlation file.
    pub fn apply_correlations(&mut self, text: &str, source: &str) -> Result<(), CliError> {
        let mut lines = numbered_lines(text);
        let (header_line, header) = lines
            .next()
            .ok_or_else(|| validation(source, 1, "empty file"))?;
        if header.trim() != "du" {
            return Err(validation(source, header_line, "header must be 'du'"));
        }
        let (du_line, du_row) = lines
            .next()
            .ok_or_else(|| validation(source, header_line, "missing delta_u row"))?;
        let delta_u = split(du_row)
            .iter()
            .enumerate()
            .map(|(k, f)| parse_real(source, du_line, &format!("du{k}"), f))
            .collect::<Result<Vec<f64>, _>>()?;
        let k = delta_u.len();
        for (index, &du) in delta_u.iter().enumerate() {
            if du < 0.0 || du.is_nan() {
                return Err(validation(
                    source,
                    du_line,
                    &format!("delta_u[{index}] must be non-negative, found {du}"),
                ));
            }
        }

        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (line, row) in lines {
            let fields = split(row);
            if fields.len() != k {
                return Err(validation(
                    source,
                    line,
                    &format!("expected {k} jacobian entries, found {}", fields.len()),
                ));
            }
            let values = fields
                .iter()
                .enumerate()
                .map(|(col, f)| parse_real(source, line, &format!("J{col}"), f))
                .collect::<Result<Vec<f64>, _>>()?;
            rows.push(values);
        }
        if rows.len() != self.points.len() {
            return Err(CliError::DimensionMismatch {
                path: source.to_string(),
                message: format!(
                    "correlation file has {} jacobian rows, dataset has {} points",
                    rows.len(),
                    self.points.len()
                ),
            });
        }
        self.jacobian = Some(Matrix::from_rows(&rows).expect("rows validated rectangular"));
        self.delta_u = Some(delta_u);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn num_parameters(&self) -> usize {
        self.points.first().map_or(0, |p| p.design.len())
    }

    pub fn num_correlation_params(&self) -> usize {
        self.delta_u.as_ref().map_or(0, Vec::len)
    }

    pub fn id(&self, index: usize) -> &str {
        &self.points[index].id
    }

    pub fn observations(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.y).collect()
    }

    pub fn design_matrix(&self) -> Matrix {
        let rows: Vec<Vec<f64>> = self.points.iter().map(|p| p.design.clone()).collect();
        Matrix::from_rows(&rows).expect("rows validated rectangular")
    }

    pub fn correlation_model(&self) -> Result<CorrelationModel, CliError> {
        let sigma: Vec<f64> = self.points.iter().map(|p| p.sigma).collect();
        let model = match (&self.jacobian, &self.delta_u) {
            (Some(jacobian), Some(delta_u)) => {
                CorrelationModel::new(sigma, jacobian.clone(), delta_u.clone())
            }
            _ => CorrelationModel::uncorrelated(sigma),
        };
        model.map_err(|e| crate::error::engine_error(e, self))
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Non-blank lines paired with their 1-based file line numbers.
fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty())
}

fn split(line: &str) -> Vec<&str> {
    line.split(',').map(str::trim).collect()
}

fn parse_real(source: &str, line: usize, column: &str, field: &str) -> Result<f64, CliError> {
    field.parse::<f64>().map_err(|_| CliError::Parse {
        path: source.to_string(),
        line,
        message: format!("column '{column}': cannot parse '{field}' as a real number"),
    })
}

fn validation(source: &str, line: usize, message: &str) -> CliError {
    CliError::Validation {
        path: source.to_string(),
        line,
        message: message.to_string(),
    }
}
