//! Linear operators `x ↦ A x`.

use crate::dense::DenseMatrix;
use crate::sparse::CsrMatrix;

/// A square real linear operator of dimension `dim()`.
///
/// Implementations only need `apply`; block application defaults to one
/// call per column.
pub trait LinearOperator: Send + Sync {
    fn dim(&self) -> usize;

    /// `y = A x`; both slices have length `dim()`.
    fn apply(&self, x: &[f64], y: &mut [f64]);

    /// Advisory only; the solver uses the same code path either way.
    fn is_symmetric(&self) -> bool {
        false
    }

    /// `‖A‖_F` when it is cheap to compute exactly.
    fn frobenius_norm(&self) -> Option<f64> {
        None
    }

    fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.apply(x, &mut y);
        y
    }

    fn apply_block(&self, x: &DenseMatrix) -> DenseMatrix {
        assert_eq!(x.rows(), self.dim());
        let mut out = DenseMatrix::zeros(self.dim(), x.cols());
        for j in 0..x.cols() {
            self.apply(x.col(j), out.col_mut(j));
        }
        out
    }
}

impl LinearOperator for DenseMatrix {
    fn dim(&self) -> usize {
        assert!(self.is_square(), "a dense operator must be square");
        self.rows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec_into(x, y);
    }

    fn is_symmetric(&self) -> bool {
        (0..self.rows()).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    fn frobenius_norm(&self) -> Option<f64> {
        Some(DenseMatrix::frobenius_norm(self))
    }
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        assert_eq!(self.rows(), self.cols(), "a sparse operator must be square");
        self.rows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec_into(x, y);
    }

    fn is_symmetric(&self) -> bool {
        self.symmetric_hint()
    }

    fn frobenius_norm(&self) -> Option<f64> {
        Some(CsrMatrix::frobenius_norm(self))
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        (**self).apply(x, y)
    }
    fn is_symmetric(&self) -> bool {
        (**self).is_symmetric()
    }
    fn frobenius_norm(&self) -> Option<f64> {
        (**self).frobenius_norm()
    }
}
