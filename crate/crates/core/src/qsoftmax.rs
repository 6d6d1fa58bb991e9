//! Softmax and argmax over an arbitrary set of unit vectors.
//!
//! Stacking the vectors `q_1..q_K` of a set as the rows of a `K x n` matrix
//! `Q` turns an encoded value `z` in `R^n` into `K` scores `Qz`. Then
//! `qsoftmax(z) = softmax(Qz)` and `qargmax(z) = argmax(Qz)`. With `Q = I`
//! both reduce to the ordinary functions.

use thiserror::Error;

use crate::geometry::{dot, UnitVectorSet, NORM_TOLERANCE};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QsoftmaxError {
    #[error("input contains non-finite values")]
    NonFinite,
    #[error("expected a vector of length {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("target {target} out of range for {classes} classes")]
    TargetOutOfRange { target: usize, classes: usize },
    #[error("row {row} of the coordinate matrix is not a unit vector")]
    NotUnit { row: usize },
    #[error("coordinate matrix needs at least one row and one column")]
    Empty,
}

/// The `K x n` change-of-coordinates matrix whose rows are unit vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CoordinateMatrix {
    pub fn from_set(set: &UnitVectorSet) -> Self {
        CoordinateMatrix {
            rows: set.len(),
            cols: set.dim(),
            data: set.as_flat().to_vec(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        CoordinateMatrix {
            rows: n,
            cols: n,
            data,
        }
    }

    /// Builds from row-major data, checking every row has unit norm.
    pub fn from_flat(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, QsoftmaxError> {
        if rows == 0 || cols == 0 {
            return Err(QsoftmaxError::Empty);
        }
        if data.len() != rows * cols {
            return Err(QsoftmaxError::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        for (row, v) in data.chunks_exact(cols).enumerate() {
            if (dot(v, v).sqrt() - 1.0).abs() > NORM_TOLERANCE {
                return Err(QsoftmaxError::NotUnit { row });
            }
        }
        Ok(CoordinateMatrix { rows, cols, data })
    }

    /// Number of labels `K`.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Encoded dimension `n`.
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    fn check_input(&self, z: &[f64]) -> Result<(), QsoftmaxError> {
        if z.len() != self.cols {
            return Err(QsoftmaxError::DimensionMismatch {
                expected: self.cols,
                found: z.len(),
            });
        }
        if z.iter().any(|x| !x.is_finite()) {
            return Err(QsoftmaxError::NonFinite);
        }
        Ok(())
    }

    /// `Qz`: the dot product of `z` with every row.
    pub fn project(&self, z: &[f64]) -> Result<Vec<f64>, QsoftmaxError> {
        self.check_input(z)?;
        Ok(self
            .data
            .chunks_exact(self.cols)
            .map(|q| dot(q, z))
            .collect())
    }

    /// `Qᵀ g` for a `K`-vector `g`.
    pub fn project_back(&self, g: &[f64]) -> Result<Vec<f64>, QsoftmaxError> {
        if g.len() != self.rows {
            return Err(QsoftmaxError::DimensionMismatch {
                expected: self.rows,
                found: g.len(),
            });
        }
        let mut out = vec![0.0; self.cols];
        for (q, &gi) in self.data.chunks_exact(self.cols).zip(g) {
            out.iter_mut().zip(q).for_each(|(o, qc)| *o += gi * qc);
        }
        Ok(out)
    }
}

/// A probability distribution over `K` labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Index of the largest probability, ties to the lowest index.
    pub fn argmax(&self) -> usize {
        argmax(&self.0)
    }
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Max-subtracted softmax.
pub fn softmax(z: &[f64]) -> Result<ProbabilityVector, QsoftmaxError> {
    if z.is_empty() {
        return Err(QsoftmaxError::Empty);
    }
    if z.iter().any(|x| !x.is_finite()) {
        return Err(QsoftmaxError::NonFinite);
    }
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = z.iter().map(|&x| (x - m).exp()).collect();
    let total: f64 = out.iter().sum();
    out.iter_mut().for_each(|p| *p /= total);
    Ok(ProbabilityVector(out))
}

/// `softmax(Qz)`, a distribution over the `K` rows of `q`.
pub fn qsoftmax(z: &[f64], q: &CoordinateMatrix) -> Result<ProbabilityVector, QsoftmaxError> {
    softmax(&q.project(z)?)
}

/// Index of the row of `q` best aligned with `z`, ties to the lowest index.
pub fn qargmax(z: &[f64], q: &CoordinateMatrix) -> Result<usize, QsoftmaxError> {
    Ok(argmax(&q.project(z)?))
}

/// Jacobian of [`qsoftmax`] with respect to `z`: `(diag(p) - p pᵀ) Q`,
/// returned row-major as `K x n`.
pub fn qsoftmax_jacobian(z: &[f64], q: &CoordinateMatrix) -> Result<Vec<f64>, QsoftmaxError> {
    let p = qsoftmax(z, q)?.into_inner();
    let (k, n) = (q.rows(), q.cols());
    // pᵀQ, shared by every row
    let mean = q.project_back(&p)?;
    let mut jac = vec![0.0; k * n];
    for i in 0..k {
        let qi = q.row(i);
        for c in 0..n {
            jac[i * n + c] = p[i] * (qi[c] - mean[c]);
        }
    }
    Ok(jac)
}

/// Negative log-likelihood `-ln p_target`.
pub fn cross_entropy(p: &ProbabilityVector, target: usize) -> Result<f64, QsoftmaxError> {
    let v = p.values();
    if target >= v.len() {
        return Err(QsoftmaxError::TargetOutOfRange {
            target,
            classes: v.len(),
        });
    }
    Ok(-v[target].ln())
}

/// Cross-entropy of `qsoftmax(z, q)` against `target`, and its gradient
/// `Qᵀ(p - onehot(target))` with respect to `z`.
///
/// The loss is computed as `logsumexp(Qz) - (Qz)_target` so it stays finite
/// when `p_target` underflows.
pub fn qsoftmax_cross_entropy(
    z: &[f64],
    q: &CoordinateMatrix,
    target: usize,
) -> Result<(f64, Vec<f64>), QsoftmaxError> {
    if target >= q.rows() {
        return Err(QsoftmaxError::TargetOutOfRange {
            target,
            classes: q.rows(),
        });
    }
    let scores = q.project(z)?;
    let m = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut p: Vec<f64> = scores.iter().map(|&s| (s - m).exp()).collect();
    let total: f64 = p.iter().sum();
    let loss = m + total.ln() - scores[target];
    p.iter_mut().for_each(|x| *x /= total);
    p[target] -= 1.0;
    Ok((loss, q.project_back(&p)?))
}
