//! Dense symmetric matrices, their LDLᵀ decomposition, inversion, and the
//! rank-one downdate that removes a data point from a known inverse.
//!
//! Storage is the packed lower triangle, so symmetry holds by construction
//! and every operation preserves it structurally. Removing point k from a
//! [`PrecisionMatrix`] sends its uncertainty to infinity; the limit of that
//! update collapses to
//!
//! ```text
//! p'(i,j) = p(i,j) − p(i,k)·p(k,j) / p(k,k)
//! ```
//!
//! after which row and column k are identically zero and the surviving block
//! equals the inverse of the covariance matrix with row/column k deleted.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Scaled guard below which a pivot is treated as zero.
///
/// `n · ε · max|diagonal|`: the standard relative threshold for elimination
/// on a matrix whose natural scale is its diagonal.
fn scaled_pivot_tolerance(n: usize, max_abs_diag: f64) -> f64 {
    n as f64 * f64::EPSILON * max_abs_diag
}

#[inline]
fn packed_index(i: usize, j: usize) -> usize {
    debug_assert!(j <= i);
    i * (i + 1) / 2 + j
}

/// Dense symmetric N×N matrix storing the lower triangle row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "symmetric matrix dimension must be at least 1");
        Self {
            n,
            data: vec![0.0; n * (n + 1) / 2],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[packed_index(i, i)] = 1.0;
        }
        m
    }

    /// Builds from a callback evaluated on the lower triangle (i ≥ j).
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                m.data[packed_index(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds from full square rows; panics if the input is not symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        assert!(n >= 1, "symmetric matrix dimension must be at least 1");
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(
                row.len(),
                n,
                "row {i} has length {}, expected {n}",
                row.len()
            );
            for (j, &value) in row.iter().enumerate().take(i) {
                assert!(value == rows[j][i], "input is not symmetric at ({i},{j})");
            }
        }
        Self::from_fn(n, |i, j| rows[i][j])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i >= j {
            self.data[packed_index(i, j)]
        } else {
            self.data[packed_index(j, i)]
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        if i >= j {
            self.data[packed_index(i, j)] = value;
        } else {
            self.data[packed_index(j, i)] = value;
        }
    }

    fn max_abs_diagonal(&self) -> f64 {
        (0..self.n)
            .map(|i| self.data[packed_index(i, i)].abs())
            .fold(0.0, f64::max)
    }

    /// Default pivot guard for this matrix: `n · ε · max|diagonal|`.
    pub fn pivot_tolerance(&self) -> f64 {
        scaled_pivot_tolerance(self.n, self.max_abs_diagonal())
    }

    /// Symmetric LDLᵀ decomposition: unit lower triangle and diagonal pivots.
    ///
    /// Completes for any symmetric matrix whose pivots stay clear of the
    /// scaled tolerance; all pivots are strictly positive exactly when the
    /// input is positive definite.
    pub fn decompose(&self) -> Result<Ldlt> {
        let n = self.n;
        let tolerance = self.pivot_tolerance();
        let mut f = self.data.clone();
        for j in 0..n {
            let d = f[packed_index(j, j)];
            if d.abs() <= tolerance {
                return Err(Error::SingularMatrix {
                    pivot: j,
                    tolerance,
                });
            }
            for i in (j + 1)..n {
                f[packed_index(i, j)] /= d;
            }
            // Trailing update of the lower triangle: A := A − (l·d)·lᵀ.
            for i in (j + 1)..n {
                let lij_d = f[packed_index(i, j)] * d;
                for k in (j + 1)..=i {
                    f[packed_index(i, k)] -= lij_d * f[packed_index(k, j)];
                }
            }
        }
        Ok(Ldlt { n, data: f })
    }

    /// Inverts a symmetric positive definite matrix.
    pub fn invert(&self) -> Result<PrecisionMatrix> {
        let ldlt = self.decompose()?;
        ldlt.require_positive_definite()?;
        let n = self.n;
        let mut out = Self::zeros(n);
        let mut x = vec![0.0; n];
        // Column j of the inverse solves A x = e_j; only rows i >= j are
        // stored, the rest follow from symmetry.
        for j in 0..n {
            x[j] = 1.0;
            for i in (j + 1)..n {
                let mut sum = 0.0;
                let row = &ldlt.data[packed_index(i, 0)..=packed_index(i, i)];
                for (m, xm) in x.iter().enumerate().take(i).skip(j) {
                    sum += row[m] * xm;
                }
                x[i] = -sum;
            }
            for (i, xi) in x.iter_mut().enumerate().take(n).skip(j) {
                *xi /= ldlt.data[packed_index(i, i)];
            }
            for i in (j..n).rev() {
                let mut sum = x[i];
                for (m, xm) in x.iter().enumerate().take(n).skip(i + 1) {
                    sum -= ldlt.data[packed_index(m, i)] * xm;
                }
                x[i] = sum;
                out.data[packed_index(i, j)] = sum;
            }
        }
        Ok(PrecisionMatrix {
            mat: out,
            removed: BTreeSet::new(),
        })
    }

    /// Copy with row and column `k` physically deleted ((N−1)×(N−1)).
    pub fn delete_row_col(&self, k: usize) -> SymmetricMatrix {
        assert!(
            k < self.n,
            "index {k} out of range for dimension {}",
            self.n
        );
        assert!(self.n >= 2, "cannot delete the only row");
        let map = |i: usize| if i < k { i } else { i + 1 };
        Self::from_fn(self.n - 1, |i, j| self.get(map(i), map(j)))
    }
}

/// LDLᵀ factors of a symmetric matrix: packed storage with the pivots on
/// the diagonal and the unit-lower-triangle multipliers below it.
#[derive(Debug, Clone)]
pub struct Ldlt {
    n: usize,
    data: Vec<f64>,
}

impl Ldlt {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn pivot(&self, i: usize) -> f64 {
        self.data[packed_index(i, i)]
    }

    pub fn pivots(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.pivot(i)).collect()
    }

    /// Entry (i, j) of the unit lower-triangular factor.
    pub fn unit_factor(&self, i: usize, j: usize) -> f64 {
        if i == j {
            1.0
        } else if i > j {
            self.data[packed_index(i, j)]
        } else {
            0.0
        }
    }

    pub fn is_positive_definite(&self) -> bool {
        (0..self.n).all(|i| self.pivot(i) > 0.0)
    }

    pub fn require_positive_definite(&self) -> Result<()> {
        for i in 0..self.n {
            let d = self.pivot(i);
            if d <= 0.0 {
                return Err(Error::NotPositiveDefinite { pivot: i, value: d });
            }
        }
        Ok(())
    }

    /// Solves A x = b using the stored factors.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: b.len(),
            });
        }
        let mut x = b.to_vec();
        for i in 0..self.n {
            let row = &self.data[packed_index(i, 0)..packed_index(i, i)];
            let mut sum = x[i];
            for (m, l) in row.iter().enumerate() {
                sum -= l * x[m];
            }
            x[i] = sum;
        }
        for (i, xi) in x.iter_mut().enumerate() {
            *xi /= self.data[packed_index(i, i)];
        }
        for i in (0..self.n).rev() {
            let mut sum = x[i];
            for (m, xm) in x.iter().enumerate().take(self.n).skip(i + 1) {
                sum -= self.data[packed_index(m, i)] * xm;
            }
            x[i] = sum;
        }
        Ok(x)
    }

    /// Re-multiplies the factors (L·D·Lᵀ); used to check the decomposition.
    pub fn reconstruct(&self) -> SymmetricMatrix {
        SymmetricMatrix::from_fn(self.n, |i, j| {
            (0..=j.min(i))
                .map(|m| self.unit_factor(i, m) * self.pivot(m) * self.unit_factor(j, m))
                .sum()
        })
    }
}

/// Inverse covariance matrix V⁻¹ with a record of downdated (removed) points.
///
/// Invariants: rows and columns of removed points are identically zero, and
/// the block over surviving points is the inverse of the covariance submatrix
/// restricted to them.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionMatrix {
    mat: SymmetricMatrix,
    removed: BTreeSet<usize>,
}

impl PrecisionMatrix {
    /// Wraps an already-inverted symmetric matrix with no removals.
    pub fn from_matrix(mat: SymmetricMatrix) -> Self {
        Self {
            mat,
            removed: BTreeSet::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.mat.get(i, j)
    }

    pub fn as_matrix(&self) -> &SymmetricMatrix {
        &self.mat
    }

    pub fn removed(&self) -> &BTreeSet<usize> {
        &self.removed
    }

    pub fn is_removed(&self, k: usize) -> bool {
        self.removed.contains(&k)
    }

    pub fn surviving(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.mat.n).filter(move |k| !self.removed.contains(k))
    }

    pub fn surviving_count(&self) -> usize {
        self.mat.n - self.removed.len()
    }

    /// Removes point k: the g → ∞ limit of adding g to its variance.
    ///
    /// Row and column k of the result are set to exact zeros rather than
    /// left to cancellation, so repeated downdates cannot drift.
    pub fn downdate(&self, k: usize) -> Result<PrecisionMatrix> {
        let mut next = self.clone();
        next.downdate_in_place(k)?;
        Ok(next)
    }

    /// In-place form of [`PrecisionMatrix::downdate`].
    pub fn downdate_in_place(&mut self, k: usize) -> Result<()> {
        let n = self.mat.n;
        assert!(k < n, "index {k} out of range for dimension {n}");
        let pivot = self.mat.data[packed_index(k, k)];
        let tolerance = self.mat.pivot_tolerance();
        if pivot <= tolerance {
            return Err(Error::DegeneratePivot {
                point: k,
                value: pivot,
            });
        }
        let column: Vec<f64> = (0..n).map(|i| self.mat.get(i, k)).collect();
        let scaled: Vec<f64> = column.iter().map(|c| c / pivot).collect();
        let data = &mut self.mat.data;
        let mut idx = 0;
        for i in 0..n {
            let ci = column[i];
            for sj in &scaled[..=i] {
                data[idx] -= ci * sj;
                idx += 1;
            }
        }
        for j in 0..=k {
            data[packed_index(k, j)] = 0.0;
        }
        for i in k..n {
            data[packed_index(i, k)] = 0.0;
        }
        self.removed.insert(k);
        Ok(())
    }

    /// Symmetric matrix-vector product P·v.
    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        let n = self.mat.n;
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: v.len(),
            });
        }
        let mut out = vec![0.0; n];
        for i in 0..n {
            let row = &self.mat.data[packed_index(i, 0)..=packed_index(i, i)];
            let vi = v[i];
            let mut acc = 0.0;
            for (j, &pij) in row.iter().enumerate().take(i) {
                out[j] += pij * vi;
                acc += pij * v[j];
            }
            out[i] += acc + row[i] * vi;
        }
        Ok(out)
    }

    /// Row dot product Σⱼ p(k,j)·vⱼ.
    pub fn row_dot(&self, k: usize, v: &[f64]) -> Result<f64> {
        let n = self.mat.n;
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: v.len(),
            });
        }
        let mut sum = 0.0;
        let row = &self.mat.data[packed_index(k, 0)..=packed_index(k, k)];
        for (j, &pkj) in row.iter().enumerate() {
            sum += pkj * v[j];
        }
        for (i, &vi) in v.iter().enumerate().take(n).skip(k + 1) {
            sum += self.mat.data[packed_index(i, k)] * vi;
        }
        Ok(sum)
    }

    /// Quadratic form vᵀ·P·v, accumulated with compensated summation so the
    /// χ²-difference identities hold close to machine precision.
    pub fn quadratic_form(&self, v: &[f64]) -> Result<f64> {
        let n = self.mat.n;
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: v.len(),
            });
        }
        let mut sum = 0.0;
        let mut comp = 0.0;
        for i in 0..n {
            let row = &self.mat.data[packed_index(i, 0)..=packed_index(i, i)];
            let vi = v[i];
            for (j, &pij) in row.iter().enumerate().take(i) {
                neumaier_add(&mut sum, &mut comp, 2.0 * pij * vi * v[j]);
            }
            neumaier_add(&mut sum, &mut comp, row[i] * vi * vi);
        }
        Ok(sum + comp)
    }
}

#[inline]
fn neumaier_add(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs_diff(a: &SymmetricMatrix, b: &SymmetricMatrix) -> f64 {
        assert_eq!(a.dim(), b.dim());
        let mut worst = 0.0_f64;
        for i in 0..a.dim() {
            for j in 0..=i {
                worst = worst.max((a.get(i, j) - b.get(i, j)).abs());
            }
        }
        worst
    }

    #[test]
    fn decompose_identity() {
        let ldlt = SymmetricMatrix::identity(3).decompose().unwrap();
        assert_eq!(ldlt.pivots(), vec![1.0, 1.0, 1.0]);
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert_eq!(ldlt.unit_factor(i, j), expected);
            }
        }
    }

    #[test]
    fn decompose_two_by_two() {
        let m = SymmetricMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let ldlt = m.decompose().unwrap();
        assert_eq!(ldlt.pivot(0), 2.0);
        assert_eq!(ldlt.pivot(1), 1.5);
        assert_eq!(ldlt.unit_factor(1, 0), 0.5);
        assert!(max_abs_diff(&ldlt.reconstruct(), &m) < 1e-15);
    }

    #[test]
    fn decompose_rank_one_is_singular() {
        let m = SymmetricMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        match m.decompose() {
            Err(Error::SingularMatrix { pivot: 1, .. }) => {}
            other => panic!("expected singular pivot 1, got {other:?}"),
        }
    }

    #[test]
    fn invert_identity_and_diagonal() {
        let inv = SymmetricMatrix::identity(4).invert().unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert_eq!(inv.get(i, j), expected);
            }
        }

        let d = SymmetricMatrix::from_rows(&[vec![4.0, 0.0], vec![0.0, 9.0]]);
        let inv = d.invert().unwrap();
        assert!((inv.get(0, 0) - 0.25).abs() < 1e-15);
        assert!((inv.get(1, 1) - 1.0 / 9.0).abs() < 1e-15);
        assert_eq!(inv.get(1, 0), 0.0);
    }

    #[test]
    fn invert_two_by_two() {
        let m = SymmetricMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let inv = m.invert().unwrap();
        assert!((inv.get(0, 0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((inv.get(1, 1) - 2.0 / 3.0).abs() < 1e-15);
        assert!((inv.get(0, 1) + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn invert_rejects_indefinite() {
        let m = SymmetricMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]);
        match m.invert() {
            Err(Error::NotPositiveDefinite { pivot: 1, .. }) => {}
            other => panic!("expected not-positive-definite, got {other:?}"),
        }
    }

    #[test]
    fn downdate_two_by_two_matches_submatrix_inverse() {
        let v = SymmetricMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let p = v.invert().unwrap();
        let down = p.downdate(0).unwrap();
        assert_eq!(down.get(0, 0), 0.0);
        assert_eq!(down.get(0, 1), 0.0);
        assert!((down.get(1, 1) - 0.5).abs() < 1e-15);
        assert!(down.is_removed(0));
        // Surviving 1x1 block equals the inverse of the submatrix [2].
        assert!((down.get(1, 1) - 1.0 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn downdate_identity_zeroes_row_and_column() {
        let p = SymmetricMatrix::identity(3).invert().unwrap();
        let down = p.downdate(1).unwrap();
        for i in 0..3 {
            assert_eq!(down.get(i, 1).to_bits(), 0.0_f64.to_bits());
            assert_eq!(down.get(1, i).to_bits(), 0.0_f64.to_bits());
        }
        assert_eq!(down.get(0, 0), 1.0);
        assert_eq!(down.get(2, 2), 1.0);
    }

    #[test]
    fn downdate_twice_is_degenerate() {
        let p = SymmetricMatrix::identity(2).invert().unwrap();
        let down = p.downdate(0).unwrap();
        match down.downdate(0) {
            Err(Error::DegeneratePivot { point: 0, .. }) => {}
            other => panic!("expected degenerate pivot, got {other:?}"),
        }
    }

    #[test]
    fn quadratic_form_examples() {
        let p = SymmetricMatrix::identity(2).invert().unwrap();
        assert_eq!(p.quadratic_form(&[1.0, 1.0]).unwrap(), 2.0);

        let v = SymmetricMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let p = v.invert().unwrap();
        assert!((p.quadratic_form(&[1.0, -1.0]).unwrap() - 2.0).abs() < 1e-14);

        assert_eq!(p.quadratic_form(&[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn quadratic_form_length_check() {
        let p = SymmetricMatrix::identity(3).invert().unwrap();
        match p.quadratic_form(&[1.0, 2.0]) {
            Err(Error::DimensionMismatch {
                expected: 3,
                got: 2,
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn delete_row_col_drops_the_right_entries() {
        let m = SymmetricMatrix::from_rows(&[
            vec![1.0, 2.0, 3.0],
            vec![2.0, 4.0, 5.0],
            vec![3.0, 5.0, 6.0],
        ]);
        let s = m.delete_row_col(1);
        assert_eq!(s.dim(), 2);
        assert_eq!(s.get(0, 0), 1.0);
        assert_eq!(s.get(1, 0), 3.0);
        assert_eq!(s.get(1, 1), 6.0);
    }

    #[test]
    fn solve_against_known_system() {
        let m = SymmetricMatrix::from_rows(&[vec![4.0, 2.0], vec![2.0, 3.0]]);
        let x = m.decompose().unwrap().solve(&[1.0, 2.0]).unwrap();
        assert!((x[0] - (-0.125)).abs() < 1e-14);
        assert!((x[1] - 0.75).abs() < 1e-14);
    }
}
