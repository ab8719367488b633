use std::path::PathBuf;
use std::time::{Duration, Instant};

use anyhow::{Context, Result};
use blockexp::{solve, LinearOperator, SolveMode, SolverConfig};
use log::info;

use crate::error::InputError;
use crate::inputs::{parse_source, read_vector};
use crate::mm::parse_matrix_market;
use crate::output::{write_residuals, write_solution};

/// Everything a run needs, resolved from the command line.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub matrix: PathBuf,
    pub source: String,
    pub v0: Option<PathBuf>,
    pub t_end: f64,
    pub config: SolverConfig,
    pub solution_out: PathBuf,
    pub residuals_out: PathBuf,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub n: usize,
    pub converged: bool,
    pub cycles: usize,
    pub initial_rank: usize,
    pub final_residual: f64,
    pub wall_time: Duration,
}

impl RunOutcome {
    /// Process exit status: 0 converged, 2 restarts exhausted.
    pub fn exit_code(&self) -> u8 {
        if self.converged {
            0
        } else {
            2
        }
    }
}

/// Reads the inputs, solves, and writes both CSV files.
///
/// Input problems surface as errors; non-convergence does not.
pub fn run_solve(manifest: &RunManifest) -> Result<RunOutcome> {
    let start = Instant::now();
    if !(manifest.t_end > 0.0) || !manifest.t_end.is_finite() {
        return Err(InputError::Invalid {
            flag: "--tmax",
            message: format!("must be positive, got {}", manifest.t_end),
        }
        .into());
    }
    manifest.config.validate().context("solver configuration")?;

    let a = parse_matrix_market(&manifest.matrix).context("--matrix")?;
    let n = a.dim();
    let g = parse_source(&manifest.source, manifest.t_end)?;
    if g.dim() != n {
        return Err(InputError::Invalid {
            flag: "--source",
            message: format!("source has dimension {} but the matrix is {n}x{n}", g.dim()),
        }
        .into());
    }
    let v = match &manifest.v0 {
        Some(path) => read_vector(path).context("--v0")?,
        None => vec![0.0; n],
    };
    if v.len() != n {
        return Err(InputError::Invalid {
            flag: "--v0",
            message: format!("initial value has {} entries but the matrix is {n}x{n}", v.len()),
        }
        .into());
    }
    info!("n = {n}, nnz = {}, T = {}", a.nnz(), manifest.t_end);

    let sol = solve(&a, &v, g.as_ref(), manifest.t_end, &manifest.config).context("solve")?;
    let states = match manifest.config.mode {
        SolveMode::Grid => sol.snapshots().to_vec(),
        SolveMode::Evaluator => sol
            .times()
            .iter()
            .map(|&t| sol.evaluate(t))
            .collect::<blockexp::Result<Vec<_>>>()
            .context("evaluating the solution")?,
    };
    write_solution(&manifest.solution_out, sol.times(), &states)?;
    write_residuals(&manifest.residuals_out, sol.history())?;

    let history = sol.history();
    Ok(RunOutcome {
        n,
        converged: sol.converged(),
        cycles: history.len(),
        initial_rank: history.first().map_or(0, |h| h.rank),
        final_residual: history.last().map_or(0.0, |h| h.max_rel_residual),
        wall_time: start.elapsed(),
    })
}
