//! Covariance assembly from uncorrelated uncertainties and shared
//! correlation parameters.
//!
//! Each correlation parameter u_k carries an uncertainty δu_k and influences
//! point i through the sensitivity J(i,k) = ∂εᵢ/∂u_k. The covariance is
//!
//! ```text
//! V = diag(σ²) + J · diag(δu²) · Jᵀ
//! ```
//!
//! The correlated term is included on the diagonal as well; with σᵢ > 0 this
//! makes V positive definite for any Jacobian.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::symmat::SymmetricMatrix;

/// Per-point uncorrelated uncertainties σᵢ plus the N×K sensitivity matrix
/// ∂εᵢ/∂u_k and the K correlation-parameter uncertainties δu_k.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationModel {
    sigma: Vec<f64>,
    jacobian: Matrix,
    delta_u: Vec<f64>,
}

impl CorrelationModel {
    pub fn new(sigma: Vec<f64>, jacobian: Matrix, delta_u: Vec<f64>) -> Result<Self> {
        for (index, &value) in sigma.iter().enumerate() {
            if value <= 0.0 || value.is_nan() {
                return Err(Error::NonPositiveSigma { index, value });
            }
        }
        for (index, &value) in delta_u.iter().enumerate() {
            if value < 0.0 || value.is_nan() {
                return Err(Error::NegativeDeltaU { index, value });
            }
        }
        if jacobian.rows() != sigma.len() {
            return Err(Error::DimensionMismatch {
                expected: sigma.len(),
                got: jacobian.rows(),
            });
        }
        if jacobian.cols() != delta_u.len() {
            return Err(Error::DimensionMismatch {
                expected: delta_u.len(),
                got: jacobian.cols(),
            });
        }
        Ok(Self {
            sigma,
            jacobian,
            delta_u,
        })
    }

    /// Model with no correlation parameters (K = 0): V is purely diagonal.
    pub fn uncorrelated(sigma: Vec<f64>) -> Result<Self> {
        let n = sigma.len();
        Self::new(sigma, Matrix::zeros(n, 0), Vec::new())
    }

    /// Number of data points N.
    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    /// Number of correlation parameters K.
    pub fn num_correlation_params(&self) -> usize {
        self.delta_u.len()
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn jacobian(&self) -> &Matrix {
        &self.jacobian
    }

    pub fn delta_u(&self) -> &[f64] {
        &self.delta_u
    }

    /// Assembles the covariance matrix V.
    pub fn assemble_covariance(&self) -> SymmetricMatrix {
        let du2: Vec<f64> = self.delta_u.iter().map(|d| d * d).collect();
        SymmetricMatrix::from_fn(self.sigma.len(), |i, j| {
            let mut v = 0.0;
            let row_i = self.jacobian.row(i);
            let row_j = self.jacobian.row(j);
            for ((ji, jj), d2) in row_i.iter().zip(row_j).zip(&du2) {
                v += ji * jj * d2;
            }
            if i == j {
                v += self.sigma[i] * self.sigma[i];
            }
            v
        })
    }

    /// Restriction of the model to the listed points (physical deletion of
    /// everything else), preserving order.
    pub fn select_points(&self, keep: &[usize]) -> CorrelationModel {
        CorrelationModel {
            sigma: keep.iter().map(|&i| self.sigma[i]).collect(),
            jacobian: self.jacobian.select_rows(keep),
            delta_u: self.delta_u.clone(),
        }
    }
}
