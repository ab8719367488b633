use std::path::PathBuf;
use std::process::ExitCode;

use blockexp::{RankRequest, SolveMode, SolverConfig};
use blockexp_cli::{run_solve, RunManifest};
use clap::{Parser, ValueEnum};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Grid,
    Evaluator,
}

/// Solve y' = -A y + g(t), y(0) = v0 on [0, tmax] with a restarted block Krylov method.
#[derive(Debug, Parser)]
#[command(name = "blockexp", version)]
struct Args {
    /// Matrix Market coordinate file holding A.
    #[arg(long)]
    matrix: PathBuf,

    /// builtin:constant:<vecfile>, builtin:sin:<vecfile>:<omega>,
    /// builtin:poly:<coeff-csv> or table:<csv>.
    #[arg(long)]
    source: String,

    /// Initial value, one entry per line (default: zero).
    #[arg(long)]
    v0: Option<PathBuf>,

    /// Final time T.
    #[arg(long)]
    tmax: f64,

    /// Relative residual tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,

    /// Number of Chebyshev sample points.
    #[arg(long, default_value_t = 40)]
    samples: usize,

    /// Keep exactly this many singular modes of the source.
    #[arg(long, conflicts_with = "rank_tol")]
    rank: Option<usize>,

    /// Keep modes with sigma > rank_tol * sigma_1.
    #[arg(long, default_value_t = 1e-12)]
    rank_tol: f64,

    /// Polynomial degree of the source fit.
    #[arg(long, default_value_t = 10)]
    degree: usize,

    /// Block Arnoldi steps per cycle.
    #[arg(long, default_value_t = 10)]
    block_steps: usize,

    #[arg(long, default_value_t = 30)]
    max_restarts: usize,

    /// Number of equispaced output times, including 0 and tmax.
    #[arg(long, default_value_t = 101)]
    output_points: usize,

    #[arg(long, default_value = "solution.csv")]
    out: PathBuf,

    #[arg(long, default_value = "residuals.csv")]
    residuals: PathBuf,

    #[arg(long, value_enum, default_value_t = Mode::Grid)]
    mode: Mode,
}

impl Args {
    fn manifest(self) -> RunManifest {
        let config = SolverConfig {
            samples: self.samples,
            rank: match self.rank {
                Some(m) => RankRequest::Explicit(m),
                None => RankRequest::Tolerance(self.rank_tol),
            },
            degree: self.degree,
            block_steps: self.block_steps,
            max_restarts: self.max_restarts,
            tol: self.tol,
            output_grid_size: self.output_points,
            mode: match self.mode {
                Mode::Grid => SolveMode::Grid,
                Mode::Evaluator => SolveMode::Evaluator,
            },
            ..SolverConfig::default()
        };
        RunManifest {
            matrix: self.matrix,
            source: self.source,
            v0: self.v0,
            t_end: self.tmax,
            config,
            solution_out: self.out,
            residuals_out: self.residuals,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let manifest = args.manifest();
    match run_solve(&manifest) {
        Ok(outcome) => {
            let cfg = &manifest.config;
            println!("n            {}", outcome.n);
            println!("samples s    {}", cfg.samples);
            println!("rank m       {}", outcome.initial_rank);
            println!("degree r     {}", cfg.degree);
            println!("block k      {}", cfg.block_steps);
            println!("cycles       {}", outcome.cycles);
            println!("residual     {:.3e}", outcome.final_residual);
            println!("converged    {}", outcome.converged);
            println!("wall time    {:.3} s", outcome.wall_time.as_secs_f64());
            ExitCode::from(outcome.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
