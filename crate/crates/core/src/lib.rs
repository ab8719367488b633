//! Residual-based restarted block Krylov solver for linear ODE systems
//! `y' = −A y + g(t)`, `y(0) = v`.
//!
//! The method has two stages:
//!
//! 1. [`source_model`]: the source is sampled on Chebyshev points, compressed
//!    by a truncated SVD and fitted by polynomials, `g(t) ≈ U p(t)`.
//! 2. [`solver`]: restart cycles of the block Arnoldi process ([`krylov`])
//!    followed by an exact solve of the projected problem ([`projected`]).
//!    Each cycle leaves a residual of the same form `V_{k+1} q(t)` as the
//!    initial one, which seeds the next cycle.
//!
//! Apart from the source fit, the only error is the Krylov residual; there is
//! no time stepping.
//!
//! ```
//! use blockexp::{solve, ConstantSource, DenseMatrix, SolverConfig};
//!
//! let a = DenseMatrix::diag(&[1.0]);
//! let g = ConstantSource::new(vec![1.0]).unwrap();
//! let sol = solve(&a, &[0.0], &g, 1.0, &SolverConfig::default()).unwrap();
//! assert!(sol.converged());
//! assert!((sol.final_state()[0] - (1.0 - (-1f64).exp())).abs() < 1e-10);
//! ```

pub mod dense;
pub mod error;
pub mod krylov;
pub mod operator;
pub mod oracle;
pub mod projected;
pub mod solver;
pub mod source_model;
pub mod sparse;

pub use dense::DenseMatrix;
pub use error::{Error, Result};
pub use krylov::{block_arnoldi, BlockArnoldiDecomposition};
pub use operator::LinearOperator;
pub use projected::{residual_coeff, residual_norm_on_grid, solve_projected, ProjectedSolution};
pub use solver::{shift_problem, solve, CycleRecord, SolveMode, Solution, SolverConfig};
pub use source_model::{
    build_poly_source, ConstantSource, FnSource, PolySource, PolynomialSource, RankRequest,
    SinusoidSource, SourceTerm, TableSource, TimeGrid,
};
pub use sparse::CsrMatrix;
