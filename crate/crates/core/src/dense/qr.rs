use super::{axpy, check_finite, dot, norm2, DenseMatrix};
use crate::error::{Error, Result};

/// Thin QR factorization with column deflation.
#[derive(Debug, Clone)]
pub struct ThinQr {
    /// `n x b'` with orthonormal columns.
    pub q: DenseMatrix,
    /// `b' x b`, upper trapezoidal in the kept columns.
    pub r: DenseMatrix,
    /// Indices of the input columns that contributed a new direction to `q`.
    pub kept_cols: Vec<usize>,
}

/// Modified Gram–Schmidt QR with one full reorthogonalization pass.
///
/// A column is dropped when the norm left after orthogonalizing it against the
/// columns already accepted is at most `rank_tol * ‖m‖_F`.
pub fn qr_thin(m: &DenseMatrix, rank_tol: f64) -> Result<ThinQr> {
    if m.rows() == 0 || m.cols() == 0 {
        return Err(Error::EmptyInput(format!(
            "qr_thin of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    if !(rank_tol >= 0.0) || !rank_tol.is_finite() {
        return Err(Error::Argument(format!("rank_tol must be finite and >= 0, got {rank_tol}")));
    }
    check_finite(m.as_slice(), "qr_thin input")?;
    Ok(qr_thin_abs(m, rank_tol * m.frobenius_norm()))
}

/// Same as [`qr_thin`] but with an absolute drop threshold and no input validation.
pub(crate) fn qr_thin_abs(m: &DenseMatrix, drop_below: f64) -> ThinQr {
    let (n, b) = (m.rows(), m.cols());
    let mut q_cols: Vec<Vec<f64>> = Vec::with_capacity(b);
    // r_cols[j] holds the coefficients of input column j against q_cols.
    let mut r_cols: Vec<Vec<f64>> = Vec::with_capacity(b);
    let mut kept_cols = Vec::new();

    for j in 0..b {
        let mut w = m.col(j).to_vec();
        let mut coeffs = vec![0.0; q_cols.len()];
        for _pass in 0..2 {
            for (c, q) in coeffs.iter_mut().zip(&q_cols) {
                let h = dot(q, &w);
                axpy(-h, q, &mut w);
                *c += h;
            }
        }
        let norm = norm2(&w);
        if norm > drop_below && norm > 0.0 && q_cols.len() < n {
            w.iter_mut().for_each(|x| *x /= norm);
            q_cols.push(w);
            coeffs.push(norm);
            kept_cols.push(j);
        }
        r_cols.push(coeffs);
    }

    let rank = q_cols.len();
    let mut r = DenseMatrix::zeros(rank, b);
    for (j, coeffs) in r_cols.iter().enumerate() {
        for (i, &c) in coeffs.iter().enumerate() {
            r[(i, j)] = c;
        }
    }
    let q = if rank == 0 {
        DenseMatrix::zeros(n, 0)
    } else {
        DenseMatrix::from_fn(n, rank, |i, j| q_cols[j][i])
    };
    ThinQr { q, r, kept_cols }
}
