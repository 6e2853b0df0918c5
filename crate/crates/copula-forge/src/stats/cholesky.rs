//! Cholesky factorization of correlation matrices, plus the SPD solve used
//! by the logistic fitter.

use thiserror::Error;

use crate::matrix::Matrix;

#[derive(Debug, Error, PartialEq)]
pub enum CholeskyError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("diagonal entry {i} must be 1 for a correlation matrix, got {value}")]
    NotUnitDiagonal { i: usize, value: f64 },
    #[error("correlation entry ({i}, {j}) out of range [-1, 1]: {value}")]
    EntryOutOfRange { i: usize, j: usize, value: f64 },
    #[error("matrix is not positive definite (pivot {pivot} failed, after jitter retry)")]
    NotPositiveDefinite { pivot: usize },
}

/// Lower-triangular factor `L` with `L L^T = R` for a correlation matrix `R`.
#[derive(Debug, Clone)]
pub struct CorrelationFactor {
    dim: usize,
    lower: Vec<f64>, // row-major dim x dim, upper half zero
}

impl CorrelationFactor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lower(&self) -> Matrix {
        Matrix::from_vec(self.dim, self.dim, self.lower.clone())
    }

    /// `L * g`, writing into `out`.
    pub fn mul_vec(&self, g: &[f64], out: &mut [f64]) {
        assert_eq!(g.len(), self.dim);
        assert_eq!(out.len(), self.dim);
        for i in 0..self.dim {
            let row = &self.lower[i * self.dim..i * self.dim + i + 1];
            let mut acc = 0.0;
            for (l, gj) in row.iter().zip(g) {
                acc += l * gj;
            }
            out[i] = acc;
        }
    }

    /// Maximum absolute entry of `L L^T - R`.
    pub fn reconstruction_error(&self, r: &Matrix) -> f64 {
        let l = self.lower();
        let rec = l.matmul(&l.transpose());
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((rec.get(i, j) - r.get(i, j)).abs());
            }
        }
        worst
    }
}

/// Factors a correlation matrix (symmetric, unit diagonal, entries in
/// [-1, 1]). A numerically indefinite but PSD matrix gets one retry with
/// 1e-10 added to the diagonal; anything still failing is an input error.
pub fn cholesky(r: &Matrix) -> Result<CorrelationFactor, CholeskyError> {
    let n = r.rows();
    if r.cols() != n {
        return Err(CholeskyError::NotSquare { rows: n, cols: r.cols() });
    }
    for i in 0..n {
        let d = r.get(i, i);
        if (d - 1.0).abs() > 1e-12 {
            return Err(CholeskyError::NotUnitDiagonal { i, value: d });
        }
        for j in 0..i {
            let v = r.get(i, j);
            if (v - r.get(j, i)).abs() > 1e-12 {
                return Err(CholeskyError::NotSymmetric { i, j });
            }
            if v.abs() > 1.0 + 1e-12 {
                return Err(CholeskyError::EntryOutOfRange { i, j, value: v });
            }
        }
    }
    match factor(r, 0.0) {
        Ok(lower) => Ok(CorrelationFactor { dim: n, lower }),
        Err(_) => match factor(r, 1e-10) {
            Ok(lower) => Ok(CorrelationFactor { dim: n, lower }),
            Err(pivot) => Err(CholeskyError::NotPositiveDefinite { pivot }),
        },
    }
}

/// Plain lower-triangular factorization of `a + jitter * I`.
/// Returns the failing pivot index on a non-positive pivot.
pub(crate) fn factor(a: &Matrix, jitter: f64) -> Result<Vec<f64>, usize> {
    let n = a.rows();
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a.get(i, j);
            if i == j {
                sum += jitter;
            }
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if sum <= 0.0 {
                    return Err(i);
                }
                l[i * n + i] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    Ok(l)
}

/// Solves `A x = b` for symmetric positive definite `A` via Cholesky
/// (forward then back substitution). Returns the failing pivot on error.
pub fn solve_spd(a: &Matrix, b: &[f64]) -> Result<Vec<f64>, usize> {
    let n = a.rows();
    assert_eq!(a.cols(), n);
    assert_eq!(b.len(), n);
    let l = factor(a, 0.0)?;
    // L y = b
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[i * n + k] * y[k];
        }
        y[i] = sum / l[i * n + i];
    }
    // L^T x = y
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut sum = y[i];
        for k in i + 1..n {
            sum -= l[k * n + i] * x[k];
        }
        x[i] = sum / l[i * n + i];
    }
    Ok(x)
}
