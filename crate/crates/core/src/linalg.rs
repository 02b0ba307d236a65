//! Small shared linear-algebra helpers: augmented design matrices and
//! Cholesky factorization with positive-definite repair.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use ndarray::{Array1, Array2};

use crate::error::TrainError;

/// Builds the N×a design matrix restricted to the active coordinates.
/// Coordinate 0 is the bias (a column of ones); coordinate d ≥ 1 maps to
/// attribute column d−1.
pub(crate) fn active_design(attributes: &Array2<f64>, active: &[usize]) -> Array2<f64> {
    let n = attributes.nrows();
    let mut design = Array2::zeros((n, active.len()));
    for (j, &coord) in active.iter().enumerate() {
        if coord == 0 {
            design.column_mut(j).fill(1.0);
        } else {
            design.column_mut(j).assign(&attributes.column(coord - 1));
        }
    }
    design
}

/// A Cholesky factorization of `a + ridge·I`, where `ridge` is the smallest
/// power-of-ten multiple of the identity (starting from 10⁻⁸, or 0 if none
/// was needed) that makes the factorization succeed.
pub(crate) struct RepairedCholesky {
    factor: Cholesky<f64, Dyn>,
    pub ridge: f64,
}

impl RepairedCholesky {
    /// Factorizes a symmetric matrix expected to be positive definite,
    /// escalating the diagonal ridge by powers of ten until it is.
    pub fn new(a: &Array2<f64>) -> Result<Self, TrainError> {
        let n = a.nrows();
        let base = DMatrix::from_row_iterator(n, n, a.iter().copied());
        if let Some(factor) = Cholesky::new(base.clone()) {
            return Ok(Self { factor, ridge: 0.0 });
        }
        for k in -8..=8 {
            let ridge = 10f64.powi(k);
            let mut shifted = base.clone();
            for i in 0..n {
                shifted[(i, i)] += ridge;
            }
            if let Some(factor) = Cholesky::new(shifted) {
                return Ok(Self { factor, ridge });
            }
        }
        Err(TrainError::NumericalFailure(
            "matrix not positive definite even after diagonal repair".into(),
        ))
    }

    pub fn solve(&self, b: &Array1<f64>) -> Array1<f64> {
        let rhs = DVector::from_iterator(b.len(), b.iter().copied());
        let sol = self.factor.solve(&rhs);
        Array1::from_iter(sol.iter().copied())
    }

    /// Diagonal of the inverse of the factorized matrix.
    pub fn inverse_diagonal(&self) -> Array1<f64> {
        let inv = self.factor.inverse();
        Array1::from_iter((0..inv.nrows()).map(|i| inv[(i, i)]))
    }
}
