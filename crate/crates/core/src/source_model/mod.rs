//! Polynomial approximation of the source term.
//!
//! The source is sampled on a time grid, the sample matrix is compressed by a
//! truncated SVD, and the coefficient function of every retained mode is
//! fitted by a polynomial, giving `g(t) ≈ U p(t)` with orthonormal `U`.

mod fit;
mod grid;
mod terms;

pub use fit::{
    fit_mode_polynomials, truncate_rank, ModeFit, PolyFitter, RankRequest, Truncation,
    TruncationTail, MAX_DEGREE,
};
pub use grid::{chebyshev_grid, TimeGrid};
pub use terms::{
    ConstantSource, FnSource, PolynomialSource, SinusoidSource, SourceTerm, TableSource,
};

use crate::dense::{check_finite, norm2, thin_svd, DenseMatrix};
use crate::error::{Error, Result};

/// Error report for a polynomial source approximation.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FitReport {
    /// `σ_{m+1}`, 0 when no singular value was discarded.
    pub sigma_tail_2norm: f64,
    /// `sqrt(σ_{m+1}² + … + σ_s²)`.
    pub sigma_tail_fro: f64,
    /// `max_i ‖g(t_i) − U p(t_i)‖₂` over the sample grid.
    pub poly_fit_residual: f64,
    pub per_mode_fit_residual: Vec<f64>,
}

/// `g(t) ≈ U p(t)` with `p_j(t) = Σ_i C[j][i] (t/T)^i`.
#[derive(Debug, Clone)]
pub struct PolySource {
    u: DenseMatrix,
    coeffs: DenseMatrix,
    t_end: f64,
    fit_report: FitReport,
}

impl PolySource {
    /// Wraps given modes `u` (`n x m`) and coefficients (`m x (r+1)`).
    pub fn new(u: DenseMatrix, coeffs: DenseMatrix, t_end: f64) -> Result<Self> {
        if u.cols() != coeffs.rows() || coeffs.cols() == 0 {
            return Err(Error::Argument(format!(
                "U has {} columns but coefficient matrix is {}x{}",
                u.cols(),
                coeffs.rows(),
                coeffs.cols()
            )));
        }
        if !(t_end > 0.0) || !t_end.is_finite() {
            return Err(Error::Argument(format!("t_end must be positive, got {t_end}")));
        }
        check_finite(u.as_slice(), "source modes")?;
        check_finite(coeffs.as_slice(), "source coefficients")?;
        Ok(PolySource {
            u,
            coeffs,
            t_end,
            fit_report: FitReport::default(),
        })
    }

    pub fn with_report(mut self, report: FitReport) -> Self {
        self.fit_report = report;
        self
    }

    pub fn modes(&self) -> &DenseMatrix {
        &self.u
    }

    pub fn coeffs(&self) -> &DenseMatrix {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.u.rows()
    }

    pub fn rank(&self) -> usize {
        self.u.cols()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.cols() - 1
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn fit_report(&self) -> &FitReport {
        &self.fit_report
    }

    /// `p(t)`, evaluated by Horner's rule in `τ = t/T`.
    pub fn eval_coeffs(&self, t: f64) -> Result<Vec<f64>> {
        self.check_time(t)?;
        Ok(self.eval_coeffs_unchecked(t))
    }

    pub(crate) fn eval_coeffs_unchecked(&self, t: f64) -> Vec<f64> {
        let tau = t / self.t_end;
        (0..self.coeffs.rows())
            .map(|j| {
                (0..self.coeffs.cols())
                    .rev()
                    .fold(0.0, |acc, i| acc * tau + self.coeffs[(j, i)])
            })
            .collect()
    }

    /// `U p(t)`. Extrapolation outside `[0, T]` is refused.
    pub fn evaluate(&self, t: f64) -> Result<Vec<f64>> {
        let p = self.eval_coeffs(t)?;
        Ok(self.u.matvec(&p))
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(0.0..=self.t_end).contains(&t) {
            return Err(Error::Argument(format!(
                "t = {t} outside the approximation interval [0, {}]",
                self.t_end
            )));
        }
        Ok(())
    }
}

/// Samples `g` at every grid point; column `i` is `g(t_i)`.
pub fn sample_source(g: &dyn SourceTerm, grid: &TimeGrid) -> Result<DenseMatrix> {
    let n = g.dim();
    if n == 0 {
        return Err(Error::EmptyInput("source of dimension 0".into()));
    }
    let mut samples = DenseMatrix::zeros(n, grid.len());
    for (i, &t) in grid.iter().enumerate() {
        let col = samples.col_mut(i);
        g.eval_into(t, col);
        if col.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("source returned a non-finite value at t = {t}")));
        }
    }
    Ok(samples)
}

/// Builds `U p(t)` from precomputed samples (`n x s`, one column per grid point).
pub fn poly_source_from_samples(
    samples: &DenseMatrix,
    grid: &TimeGrid,
    rank: RankRequest,
    degree: usize,
) -> Result<PolySource> {
    if samples.cols() != grid.len() {
        return Err(Error::Argument(format!(
            "{} sample columns for a {}-point grid",
            samples.cols(),
            grid.len()
        )));
    }
    // Validate the degree before paying for the SVD.
    PolyFitter::new(grid, degree)?;
    let svd = thin_svd(samples)?;
    let trunc = truncate_rank(&svd, rank)?;
    let fit = fit_mode_polynomials(&trunc.sigma, &trunc.v, grid, degree)?;
    let ps = PolySource::new(trunc.u, fit.coeffs, grid.t_end())?;
    let poly_fit_residual = max_sample_misfit(&ps, samples, grid);
    Ok(ps.with_report(FitReport {
        sigma_tail_2norm: trunc.tail.two_norm,
        sigma_tail_fro: trunc.tail.fro,
        poly_fit_residual,
        per_mode_fit_residual: fit.residuals,
    }))
}

/// Samples `g` on `s` Chebyshev points of `[0, t_end]` and builds `U p(t)`.
pub fn build_poly_source(
    g: &dyn SourceTerm,
    s: usize,
    rank: RankRequest,
    degree: usize,
    t_end: f64,
) -> Result<PolySource> {
    let grid = chebyshev_grid(s, t_end)?;
    let samples = sample_source(g, &grid)?;
    poly_source_from_samples(&samples, &grid, rank, degree)
}

/// `max_i ‖samples[:, i] − U p(t_i)‖₂`.
pub(crate) fn max_sample_misfit(ps: &PolySource, samples: &DenseMatrix, grid: &TimeGrid) -> f64 {
    grid.iter()
        .enumerate()
        .map(|(i, &t)| {
            let approx = ps.u.matvec(&ps.eval_coeffs_unchecked(t));
            let diff: Vec<f64> = samples.col(i).iter().zip(&approx).map(|(a, b)| a - b).collect();
            norm2(&diff)
        })
        .fold(0.0, f64::max)
}
