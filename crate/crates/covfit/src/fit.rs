//! Linear generalized least squares.
//!
//! The model is linear in its parameters: point i predicts
//! Σₐ X(i,a)·βₐ for a caller-supplied design matrix X. The fit minimizes
//! χ² = εᵀ·V⁻¹·ε by solving the normal equations
//! (Xᵀ·V⁻¹·X)·β = Xᵀ·V⁻¹·y. Points downdated out of the precision matrix
//! contribute zero rows and are therefore inert; their residuals are forced
//! to exactly zero in the result.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::symmat::{PrecisionMatrix, SymmetricMatrix};

/// A linear fitting problem: design matrix, observations, and the precision
/// matrix (possibly with points already downdated out).
#[derive(Debug, Clone)]
pub struct FitProblem {
    design: Matrix,
    observations: Vec<f64>,
    precision: PrecisionMatrix,
}

impl FitProblem {
    pub fn new(design: Matrix, observations: Vec<f64>, precision: PrecisionMatrix) -> Result<Self> {
        let n = precision.dim();
        if design.rows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: design.rows(),
            });
        }
        if observations.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: observations.len(),
            });
        }
        if design.cols() == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        let problem = Self {
            design,
            observations,
            precision,
        };
        problem.require_enough_points()?;
        Ok(problem)
    }

    fn require_enough_points(&self) -> Result<()> {
        let surviving = self.precision.surviving_count();
        let p = self.design.cols();
        if surviving < p {
            return Err(Error::TooFewPoints {
                surviving,
                required: p,
            });
        }
        Ok(())
    }

    pub fn design(&self) -> &Matrix {
        &self.design
    }

    pub fn observations(&self) -> &[f64] {
        &self.observations
    }

    pub fn precision(&self) -> &PrecisionMatrix {
        &self.precision
    }

    pub fn precision_mut(&mut self) -> &mut PrecisionMatrix {
        &mut self.precision
    }

    pub fn num_parameters(&self) -> usize {
        self.design.cols()
    }
}

/// Outcome of a GLS fit.
#[derive(Debug, Clone)]
pub struct FitResult {
    /// Fitted parameters β.
    pub parameters: Vec<f64>,
    /// Residuals ε = y − X·β, exactly zero at removed points.
    pub residuals: Vec<f64>,
    /// χ² = εᵀ·V⁻¹·ε at the minimum.
    pub chi2: f64,
    /// Surviving point count minus parameter count.
    pub dof: usize,
    /// (Xᵀ·V⁻¹·X)⁻¹ over the surviving points.
    pub parameter_covariance: SymmetricMatrix,
}

/// Fits the problem, minimizing εᵀ·V⁻¹·ε over the linear parameters.
pub fn gls_fit(problem: &FitProblem) -> Result<FitResult> {
    problem.require_enough_points()?;
    let n = problem.precision.dim();
    let p = problem.design.cols();

    let columns: Vec<Vec<f64>> = (0..p).map(|a| problem.design.column(a)).collect();
    let weighted: Vec<Vec<f64>> = columns
        .iter()
        .map(|c| problem.precision.mul_vec(c))
        .collect::<Result<_>>()?;

    let normal = SymmetricMatrix::from_fn(p, |a, b| dot(&columns[a], &weighted[b]));
    let rhs: Vec<f64> = weighted
        .iter()
        .map(|w| dot(w, &problem.observations))
        .collect();

    let ldlt = normal.decompose().map_err(rank_deficient)?;
    ldlt.require_positive_definite().map_err(rank_deficient)?;
    let parameters = ldlt.solve(&rhs)?;
    let parameter_covariance = normal.invert().map_err(rank_deficient)?.as_matrix().clone();

    let mut residuals = vec![0.0; n];
    for (i, r) in residuals.iter_mut().enumerate() {
        if !problem.precision.is_removed(i) {
            *r = problem.observations[i] - dot(problem.design.row(i), &parameters);
        }
    }
    let chi2 = problem.precision.quadratic_form(&residuals)?;
    let dof = problem.precision.surviving_count() - p;

    Ok(FitResult {
        parameters,
        residuals,
        chi2,
        dof,
        parameter_covariance,
    })
}

/// χ² of a residual vector under the given precision matrix.
pub fn chi_squared(residuals: &[f64], precision: &PrecisionMatrix) -> Result<f64> {
    precision.quadratic_form(residuals)
}

fn rank_deficient(err: Error) -> Error {
    match err {
        Error::SingularMatrix { .. } | Error::NotPositiveDefinite { .. } => {
            Error::RankDeficientDesign
        }
        other => other,
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_precision(n: usize) -> PrecisionMatrix {
        SymmetricMatrix::identity(n).invert().unwrap()
    }

    #[test]
    fn unweighted_mean() {
        let problem = FitProblem::new(
            Matrix::column_of_ones(3),
            vec![1.0, 2.0, 3.0],
            identity_precision(3),
        )
        .unwrap();
        let fit = gls_fit(&problem).unwrap();
        assert!((fit.parameters[0] - 2.0).abs() < 1e-14);
        assert_eq!(fit.residuals.len(), 3);
        assert!((fit.residuals[0] + 1.0).abs() < 1e-14);
        assert!(fit.residuals[1].abs() < 1e-14);
        assert!((fit.residuals[2] - 1.0).abs() < 1e-14);
        assert!((fit.chi2 - 2.0).abs() < 1e-14);
        assert_eq!(fit.dof, 2);
        assert!((fit.parameter_covariance.get(0, 0) - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn perfect_fit_has_zero_chi2() {
        let design = Matrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let y = vec![0.5, 1.5, 2.5]; // exactly 0.5 + 1.0 * x
        let v = SymmetricMatrix::from_rows(&[
            vec![2.0, 0.5, 0.1],
            vec![0.5, 1.0, 0.2],
            vec![0.1, 0.2, 3.0],
        ]);
        let problem = FitProblem::new(design, y, v.invert().unwrap()).unwrap();
        let fit = gls_fit(&problem).unwrap();
        assert!(fit.chi2.abs() < 1e-12);
        assert!((fit.parameters[0] - 0.5).abs() < 1e-10);
        assert!((fit.parameters[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn correlated_mean_matches_scan() {
        // Minimizer of chi2(beta) for X = ones, V = [[2,1],[1,2]], y = (0,3).
        let v = SymmetricMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let precision = v.invert().unwrap();
        let problem =
            FitProblem::new(Matrix::column_of_ones(2), vec![0.0, 3.0], precision.clone()).unwrap();
        let fit = gls_fit(&problem).unwrap();

        // Golden-section scan of chi2 over beta.
        let chi2_of = |beta: f64| precision.quadratic_form(&[0.0 - beta, 3.0 - beta]).unwrap();
        let (mut lo, mut hi) = (-10.0_f64, 10.0_f64);
        let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
        for _ in 0..100 {
            let a = hi - phi * (hi - lo);
            let b = lo + phi * (hi - lo);
            if chi2_of(a) < chi2_of(b) {
                hi = b;
            } else {
                lo = a;
            }
        }
        // The bracket stalls once chi2 differences drop below machine
        // resolution; finite-difference Newton steps finish the job.
        let mut scanned = 0.5 * (lo + hi);
        let h = 1e-3;
        for _ in 0..3 {
            let d1 = (chi2_of(scanned + h) - chi2_of(scanned - h)) / (2.0 * h);
            let d2 =
                (chi2_of(scanned + h) - 2.0 * chi2_of(scanned) + chi2_of(scanned - h)) / (h * h);
            scanned -= d1 / d2;
        }
        assert!((fit.parameters[0] - scanned).abs() < 1e-8);
        assert!((fit.chi2 - chi2_of(fit.parameters[0])).abs() < 1e-12);
    }

    #[test]
    fn removed_points_are_inert_and_zeroed() {
        let mut precision = identity_precision(4);
        precision.downdate_in_place(2).unwrap();
        let problem = FitProblem::new(
            Matrix::column_of_ones(4),
            vec![1.0, 2.0, 100.0, 3.0],
            precision,
        )
        .unwrap();
        let fit = gls_fit(&problem).unwrap();
        assert!((fit.parameters[0] - 2.0).abs() < 1e-14);
        assert_eq!(fit.residuals[2].to_bits(), 0.0_f64.to_bits());
        assert_eq!(fit.dof, 2);
    }

    #[test]
    fn rank_deficient_design_is_reported() {
        let design = Matrix::from_rows(&[vec![1.0, 2.0], vec![1.0, 2.0], vec![1.0, 2.0]]).unwrap();
        let problem = FitProblem::new(design, vec![1.0, 2.0, 3.0], identity_precision(3)).unwrap();
        assert_eq!(gls_fit(&problem).unwrap_err(), Error::RankDeficientDesign);
    }

    #[test]
    fn too_few_points_is_reported() {
        let mut precision = identity_precision(2);
        precision.downdate_in_place(0).unwrap();
        precision.downdate_in_place(1).unwrap();
        let err =
            FitProblem::new(Matrix::column_of_ones(2), vec![1.0, 2.0], precision).unwrap_err();
        assert_eq!(
            err,
            Error::TooFewPoints {
                surviving: 0,
                required: 1
            }
        );
    }

    #[test]
    fn chi_squared_examples() {
        assert_eq!(
            chi_squared(&[1.0, 1.0], &identity_precision(2)).unwrap(),
            2.0
        );
        let v = SymmetricMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let p = v.invert().unwrap();
        assert!((chi_squared(&[1.0, -1.0], &p).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(chi_squared(&[0.0, 0.0], &p).unwrap(), 0.0);
    }
}
