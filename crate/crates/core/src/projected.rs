//! Exact solution of the projected problem `u' = −H u + b(t)`, `u(0) = 0`,
//! for polynomial `b`.
//!
//! With `b(t) = Σ_j c_j τ^j`, `τ = t/T`, the solution is the top block of
//! `exp(τ Â) e_last` for the augmented matrix
//!
//! ```text
//!     Â = [ −T H   B ]      B[:, i] = j! T c_j,  j = r − i
//!         [   0    N ]      N = upper shift of size r + 1
//! ```
//!
//! so no time discretization is involved.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use crate::dense::{check_finite, expm, norm2, DenseMatrix};
use crate::error::{Error, Result};
use crate::krylov::BlockArnoldiDecomposition;

/// `u' = −H u + b(t)` with `b` given by monomial coefficients in `τ = t/T`.
#[derive(Debug, Clone)]
pub struct ProjectedProblem {
    h: DenseMatrix,
    source_coeffs: DenseMatrix,
    t_end: f64,
}

impl ProjectedProblem {
    pub fn new(h: DenseMatrix, source_coeffs: DenseMatrix, t_end: f64) -> Result<Self> {
        if !h.is_square() || h.rows() == 0 {
            return Err(Error::Argument(format!(
                "projected matrix must be square and non-empty, got {}x{}",
                h.rows(),
                h.cols()
            )));
        }
        if source_coeffs.rows() != h.rows() || source_coeffs.cols() == 0 {
            return Err(Error::Argument(format!(
                "source coefficients are {}x{}, expected {} rows",
                source_coeffs.rows(),
                source_coeffs.cols(),
                h.rows()
            )));
        }
        if !(t_end > 0.0) || !t_end.is_finite() {
            return Err(Error::Argument(format!("t_end must be positive, got {t_end}")));
        }
        check_finite(h.as_slice(), "projected matrix")?;
        check_finite(source_coeffs.as_slice(), "projected source coefficients")?;
        Ok(ProjectedProblem {
            h,
            source_coeffs,
            t_end,
        })
    }

    /// `E₁ C`: places the `m x (r+1)` coefficients in the first rows of a `d x (r+1)` matrix.
    pub fn lift(coeffs: &DenseMatrix, d: usize) -> DenseMatrix {
        assert!(coeffs.rows() <= d);
        let mut lifted = DenseMatrix::zeros(d, coeffs.cols());
        lifted.set_block(0, 0, coeffs);
        lifted
    }

    pub fn dim(&self) -> usize {
        self.h.rows()
    }

    pub fn degree(&self) -> usize {
        self.source_coeffs.cols() - 1
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.h
    }

    pub fn source_coeffs(&self) -> &DenseMatrix {
        &self.source_coeffs
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    /// `b(t)`.
    pub fn source_at(&self, t: f64) -> Vec<f64> {
        let tau = t / self.t_end;
        let c = &self.source_coeffs;
        (0..c.rows())
            .map(|i| (0..c.cols()).rev().fold(0.0, |acc, j| acc * tau + c[(i, j)]))
            .collect()
    }

    fn augmented_matrix(&self) -> DenseMatrix {
        let d = self.dim();
        let r = self.degree();
        let t = self.t_end;
        let mut aug = DenseMatrix::zeros(d + r + 1, d + r + 1);
        aug.set_block(0, 0, &self.h.scaled(-t));
        let mut factorial = 1.0;
        for j in 0..=r {
            if j > 0 {
                factorial *= j as f64;
            }
            let col = d + r - j;
            for i in 0..d {
                aug[(i, col)] = factorial * t * self.source_coeffs[(i, j)];
            }
        }
        for i in 0..r {
            aug[(d + i, d + i + 1)] = 1.0;
        }
        aug
    }
}

/// Evaluator for `u(t)`; exponentials are memoized per distinct `t`.
pub struct ProjectedSolution {
    problem: ProjectedProblem,
    augmented: DenseMatrix,
    cache: Mutex<HashMap<u64, Vec<f64>>>,
}

impl ProjectedSolution {
    pub fn problem(&self) -> &ProjectedProblem {
        &self.problem
    }

    pub fn augmented_matrix(&self) -> &DenseMatrix {
        &self.augmented
    }

    pub fn dim(&self) -> usize {
        self.problem.dim()
    }

    /// `u(t)`; `u(0)` is exactly zero.
    pub fn evaluate(&self, t: f64) -> Result<Vec<f64>> {
        if !t.is_finite() {
            return Err(Error::Domain(format!("evaluation time {t}")));
        }
        let d = self.dim();
        if t == 0.0 {
            return Ok(vec![0.0; d]);
        }
        let key = t.to_bits();
        if let Some(u) = self.cache.lock().unwrap().get(&key) {
            return Ok(u.clone());
        }
        let e = expm(&self.augmented.scaled(t / self.problem.t_end))?;
        let last = e.cols() - 1;
        let u = e.col(last)[..d].to_vec();
        self.cache.lock().unwrap().insert(key, u.clone());
        Ok(u)
    }

    /// Drops memoized exponentials.
    pub fn clear_cache(&self) {
        self.cache.lock().unwrap().clear();
    }
}

impl Clone for ProjectedSolution {
    fn clone(&self) -> Self {
        ProjectedSolution {
            problem: self.problem.clone(),
            augmented: self.augmented.clone(),
            cache: Mutex::new(self.cache.lock().unwrap().clone()),
        }
    }
}

impl fmt::Debug for ProjectedSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProjectedSolution")
            .field("problem", &self.problem)
            .field("cached_times", &self.cache.lock().unwrap().len())
            .finish()
    }
}

/// Builds the evaluator for `u' = −H u + C_lift p(τ)`, `u(0) = 0` on `[0, t_end]`.
pub fn solve_projected(h: &DenseMatrix, c_lift: &DenseMatrix, t_end: f64) -> Result<ProjectedSolution> {
    let problem = ProjectedProblem::new(h.clone(), c_lift.clone(), t_end)?;
    let augmented = problem.augmented_matrix();
    Ok(ProjectedSolution {
        problem,
        augmented,
        cache: Mutex::new(HashMap::new()),
    })
}

/// `q(t) = −H_{k+1,k} E_kᵀ u(t)`, so that the residual is `r_k(t) = V_{k+1} q(t)`.
///
/// Returns an empty vector for an invariant decomposition, whose residual
/// vanishes identically.
pub fn residual_coeff(
    dec: &BlockArnoldiDecomposition,
    sol: &ProjectedSolution,
    t: f64,
) -> Result<Vec<f64>> {
    let t_end = sol.problem.t_end;
    if !(0.0..=t_end).contains(&t) {
        return Err(Error::Argument(format!("t = {t} outside [0, {t_end}]")));
    }
    if sol.dim() != dec.projected_dim() {
        return Err(Error::Argument(format!(
            "projected solution has dimension {}, decomposition {}",
            sol.dim(),
            dec.projected_dim()
        )));
    }
    let Some(coupling) = dec.coupling_block() else {
        return Ok(Vec::new());
    };
    let u = sol.evaluate(t)?;
    let last = &u[u.len() - coupling.cols()..];
    Ok(coupling.matvec(last).into_iter().map(|x| -x).collect())
}

/// `‖q(t_i)‖₂` at every time and their maximum.
pub fn residual_norm_on_grid(
    dec: &BlockArnoldiDecomposition,
    sol: &ProjectedSolution,
    times: &[f64],
) -> Result<(f64, Vec<f64>)> {
    let per_point = times
        .iter()
        .map(|&t| residual_coeff(dec, sol, t).map(|q| norm2(&q)))
        .collect::<Result<Vec<f64>>>()?;
    let max = per_point.iter().copied().fold(0.0, f64::max);
    Ok((max, per_point))
}
