//! Block Arnoldi process with deflation.
//!
//! Builds an orthonormal basis `V_[k+1] = [V_1 … V_{k+1}]` of the block Krylov
//! subspace `span{U, AU, …, A^k U}` and the block upper Hessenberg matrix
//! `H_[k+1,k]` with `A V_[k] = V_[k+1] H_[k+1,k]`. Blocks may shrink when a
//! new direction is numerically dependent on the previous ones; a block that
//! shrinks to nothing means the subspace is invariant under `A`.

use crate::dense::{qr_thin_abs, DenseMatrix};
use crate::error::{Error, Result};
use crate::operator::LinearOperator;

/// Default relative threshold below which a new direction is deflated.
pub const DEFAULT_DEFLATION_TOL: f64 = 1e-10;

/// Result of `k` block Arnoldi steps.
#[derive(Debug, Clone)]
pub struct BlockArnoldiDecomposition {
    blocks: Vec<DenseMatrix>,
    h: DenseMatrix,
    steps: usize,
    invariant: bool,
    op_scale: f64,
}

impl BlockArnoldiDecomposition {
    /// Number of completed block steps `k`.
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Width `m` of the starting block.
    pub fn initial_width(&self) -> usize {
        self.blocks[0].cols()
    }

    /// Widths of all stored blocks `V_1, …` (including `V_{k+1}` when present).
    pub fn widths(&self) -> Vec<usize> {
        self.blocks.iter().map(DenseMatrix::cols).collect()
    }

    /// True when the process stopped because the subspace became invariant;
    /// then `A V_[k] = V_[k] H_[k,k]` holds and there is no `V_{k+1}`.
    pub fn is_invariant(&self) -> bool {
        self.invariant
    }

    /// `Σ_{i ≤ k} m_i`, the dimension of the projected problem.
    pub fn projected_dim(&self) -> usize {
        self.h.cols()
    }

    pub fn blocks(&self) -> &[DenseMatrix] {
        &self.blocks
    }

    /// `V_[k]`.
    pub fn basis(&self) -> DenseMatrix {
        let parts: Vec<&DenseMatrix> = self.blocks[..self.steps].iter().collect();
        DenseMatrix::hcat(&parts)
    }

    /// `V_[k+1]` (equal to `V_[k]` for an invariant decomposition).
    pub fn extended_basis(&self) -> DenseMatrix {
        let parts: Vec<&DenseMatrix> = self.blocks.iter().collect();
        DenseMatrix::hcat(&parts)
    }

    /// `H_[k+1,k]` (square `H_[k,k]` for an invariant decomposition).
    pub fn hessenberg(&self) -> &DenseMatrix {
        &self.h
    }

    /// `H_[k,k]`.
    pub fn projected_matrix(&self) -> DenseMatrix {
        let d = self.projected_dim();
        self.h.block(0, 0, d, d)
    }

    /// `V_{k+1}`, absent for an invariant decomposition.
    pub fn next_block(&self) -> Option<&DenseMatrix> {
        if self.invariant {
            None
        } else {
            self.blocks.last()
        }
    }

    /// `H_{k+1,k}`, the only nonzero block in the last block row.
    pub fn coupling_block(&self) -> Option<DenseMatrix> {
        let next = self.next_block()?;
        let d = self.projected_dim();
        let last = self.blocks[self.steps - 1].cols();
        Some(self.h.block(d, d - last, next.cols(), last))
    }

    /// `max_i ‖A V_i‖_F / ‖V_i‖_F` over the blocks that were multiplied by `A`.
    pub fn operator_scale(&self) -> f64 {
        self.op_scale
    }

    /// `‖A V_[k] − V_[k+1] H_[k+1,k]‖_F`, recomputed from scratch.
    pub fn decomposition_residual(&self, op: &dyn LinearOperator) -> f64 {
        let av = op.apply_block(&self.basis());
        av.sub(&self.extended_basis().matmul(&self.h)).frobenius_norm()
    }
}

/// Runs `k` block Arnoldi steps from the orthonormal block `u`.
///
/// Each new block is orthogonalized against all previous blocks by block
/// modified Gram–Schmidt, twice, and then factored by thin QR. Columns whose
/// norm after orthogonalization is at most `deflation_tol` times the
/// Frobenius norm of `A V_j` are dropped.
pub fn block_arnoldi(
    op: &dyn LinearOperator,
    u: &DenseMatrix,
    k: usize,
    deflation_tol: f64,
) -> Result<BlockArnoldiDecomposition> {
    let n = op.dim();
    let m = u.cols();
    if u.rows() != n {
        return Err(Error::Argument(format!(
            "starting block has {} rows, operator dimension is {n}",
            u.rows()
        )));
    }
    if m == 0 || k == 0 {
        return Err(Error::Argument(format!("need m >= 1 and k >= 1, got m = {m}, k = {k}")));
    }
    if k * m > n {
        return Err(Error::Argument(format!("k*m = {} exceeds the dimension {n}", k * m)));
    }
    if !(deflation_tol >= 0.0) {
        return Err(Error::Argument(format!("deflation_tol must be >= 0, got {deflation_tol}")));
    }
    let orth = u.orthonormality_error();
    if !(orth <= 1e-10) {
        return Err(Error::Argument(format!(
            "starting block is not orthonormal: ‖UᵀU − I‖_F = {orth:e}"
        )));
    }

    let mut blocks = vec![u.clone()];
    // coupling[j] holds H_{i,j} for i = 0..=j+1 (last entry absent on invariance).
    let mut coupling: Vec<Vec<DenseMatrix>> = Vec::with_capacity(k);
    let mut invariant = false;
    let mut op_scale = 0.0f64;

    for j in 0..k {
        let vj = &blocks[j];
        let mut w = op.apply_block(vj);
        if !w.is_finite() {
            return Err(Error::Domain(format!("operator produced non-finite values at block step {j}")));
        }
        let pre_norm = w.frobenius_norm();
        op_scale = op_scale.max(pre_norm / (vj.cols() as f64).sqrt());

        let mut hj: Vec<DenseMatrix> = blocks
            .iter()
            .map(|b| DenseMatrix::zeros(b.cols(), vj.cols()))
            .collect();
        for _pass in 0..2 {
            for (vi, hij) in blocks.iter().zip(hj.iter_mut()) {
                let c = vi.tr_matmul(&w);
                w = w.sub(&vi.matmul(&c));
                *hij = hij.add_scaled(1.0, &c);
            }
        }

        let qr = qr_thin_abs(&w, deflation_tol * pre_norm);
        if qr.q.cols() == 0 {
            coupling.push(hj);
            invariant = true;
            break;
        }
        hj.push(qr.r);
        coupling.push(hj);
        blocks.push(qr.q);
    }

    let steps = coupling.len();
    let offsets: Vec<usize> = blocks
        .iter()
        .scan(0, |acc, b| {
            let start = *acc;
            *acc += b.cols();
            Some(start)
        })
        .collect();
    let rows: usize = blocks.iter().map(DenseMatrix::cols).sum();
    let cols: usize = blocks[..steps].iter().map(DenseMatrix::cols).sum();
    let mut h = DenseMatrix::zeros(rows, cols);
    for (j, col_blocks) in coupling.iter().enumerate() {
        for (i, hij) in col_blocks.iter().enumerate() {
            h.set_block(offsets[i], offsets[j], hij);
        }
    }

    Ok(BlockArnoldiDecomposition {
        blocks,
        h,
        steps,
        invariant,
        op_scale,
    })
}
