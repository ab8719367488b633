use crate::dense::{qr_thin_abs, DenseMatrix, ThinSvd};
use crate::error::{Error, Result};

use super::grid::TimeGrid;

/// Largest polynomial degree accepted by the fitter.
pub const MAX_DEGREE: usize = 20;

/// How many singular triplets to keep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RankRequest {
    /// Keep exactly this many.
    Explicit(usize),
    /// Keep the smallest `m` with `σ_{m+1} ≤ ε σ_1`.
    Tolerance(f64),
}

impl Default for RankRequest {
    fn default() -> Self {
        RankRequest::Tolerance(1e-12)
    }
}

/// Norms of the discarded part `G̃ − U Σ Vᵀ`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TruncationTail {
    /// `σ_{m+1}`, or 0 when nothing was discarded.
    pub two_norm: f64,
    /// `sqrt(σ_{m+1}² + … + σ_s²)`.
    pub fro: f64,
}

/// The leading `m` singular triplets.
#[derive(Debug, Clone)]
pub struct Truncation {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
    pub tail: TruncationTail,
}

impl Truncation {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }
}

pub fn truncate_rank(svd: &ThinSvd, request: RankRequest) -> Result<Truncation> {
    let s = svd.sigma.len();
    let m = match request {
        RankRequest::Explicit(m) => {
            if m == 0 || m > s {
                return Err(Error::Argument(format!("rank {m} outside 1..={s}")));
            }
            m
        }
        RankRequest::Tolerance(eps) => {
            if !(eps >= 0.0) {
                return Err(Error::Argument(format!("rank tolerance must be >= 0, got {eps}")));
            }
            let cut = eps * svd.sigma.first().copied().unwrap_or(0.0);
            (1..s).find(|&m| svd.sigma[m] <= cut).unwrap_or(s)
        }
    };
    let discarded = &svd.sigma[m..];
    let tail = TruncationTail {
        two_norm: discarded.first().copied().unwrap_or(0.0),
        fro: discarded.iter().map(|x| x * x).sum::<f64>().sqrt(),
    };
    Ok(Truncation {
        u: svd.u.leading_columns(m),
        sigma: svd.sigma[..m].to_vec(),
        v: svd.v.leading_columns(m),
        tail,
    })
}

/// Least-squares fitter for degree-`r` polynomials in `τ = t/T` on a fixed grid.
///
/// The Vandermonde matrix is factored once by thin QR; every fit is then a
/// projection plus a triangular solve.
#[derive(Debug, Clone)]
pub struct PolyFitter {
    vandermonde: DenseMatrix,
    q: DenseMatrix,
    r: DenseMatrix,
}

impl PolyFitter {
    pub fn new(grid: &TimeGrid, degree: usize) -> Result<Self> {
        let s = grid.len();
        if degree > MAX_DEGREE {
            return Err(Error::Argument(format!(
                "polynomial degree {degree} exceeds the cap {MAX_DEGREE}"
            )));
        }
        if degree + 1 > s {
            return Err(Error::Argument(format!(
                "degree {degree} needs at least {} sample points, grid has {s}",
                degree + 1
            )));
        }
        let tau = grid.scaled_points();
        let vandermonde = DenseMatrix::from_fn(s, degree + 1, |i, j| tau[i].powi(j as i32));
        let qr = qr_thin_abs(&vandermonde, 0.0);
        if qr.q.cols() != degree + 1 {
            return Err(Error::Argument(format!(
                "Vandermonde matrix of degree {degree} is numerically rank deficient"
            )));
        }
        Ok(PolyFitter {
            vandermonde,
            q: qr.q,
            r: qr.r,
        })
    }

    pub fn degree(&self) -> usize {
        self.r.cols() - 1
    }

    /// Monomial coefficients (lowest power first) and the residual 2-norm.
    pub fn fit(&self, values: &[f64]) -> (Vec<f64>, f64) {
        let rhs = self.q.tr_matvec(values);
        let k = rhs.len();
        let mut c = vec![0.0; k];
        for i in (0..k).rev() {
            let mut acc = rhs[i];
            for j in i + 1..k {
                acc -= self.r[(i, j)] * c[j];
            }
            c[i] = acc / self.r[(i, i)];
        }
        let fitted = self.vandermonde.matvec(&c);
        let residual = values
            .iter()
            .zip(&fitted)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        (c, residual)
    }

    /// Fits every row of `data` (rows = functions, columns = grid points).
    pub fn fit_rows(&self, data: &DenseMatrix) -> (DenseMatrix, Vec<f64>) {
        let mut coeffs = DenseMatrix::zeros(data.rows(), self.degree() + 1);
        let mut residuals = Vec::with_capacity(data.rows());
        for j in 0..data.rows() {
            let (c, res) = self.fit(&data.row(j));
            for (i, ci) in c.into_iter().enumerate() {
                coeffs[(j, i)] = ci;
            }
            residuals.push(res);
        }
        (coeffs, residuals)
    }
}

/// Per-mode polynomial coefficients and fit residuals.
#[derive(Debug, Clone)]
pub struct ModeFit {
    /// `m x (r+1)`, row `j` holds the monomial coefficients of `p_j` in `τ`.
    pub coeffs: DenseMatrix,
    pub residuals: Vec<f64>,
}

/// Fits `p_j(t_i) ≈ σ_j V[i][j]` for every retained mode `j`.
pub fn fit_mode_polynomials(
    sigma: &[f64],
    v: &DenseMatrix,
    grid: &TimeGrid,
    degree: usize,
) -> Result<ModeFit> {
    if v.rows() != grid.len() || v.cols() != sigma.len() {
        return Err(Error::Argument(format!(
            "V is {}x{} but grid has {} points and {} singular values were given",
            v.rows(),
            v.cols(),
            grid.len(),
            sigma.len()
        )));
    }
    let fitter = PolyFitter::new(grid, degree)?;
    let data = DenseMatrix::from_fn(sigma.len(), grid.len(), |j, i| sigma[j] * v[(i, j)]);
    let (coeffs, residuals) = fitter.fit_rows(&data);
    Ok(ModeFit { coeffs, residuals })
}
