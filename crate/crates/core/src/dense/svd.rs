use super::{axpy, check_finite, dot, norm2, DenseMatrix};
use crate::error::Result;

const MAX_SWEEPS: usize = 80;

/// Thin singular value decomposition `M = U diag(sigma) Vᵀ`.
#[derive(Debug, Clone)]
pub struct ThinSvd {
    /// `n x s`, orthonormal columns.
    pub u: DenseMatrix,
    /// Non-increasing, non-negative.
    pub sigma: Vec<f64>,
    /// `s x s`, orthonormal columns.
    pub v: DenseMatrix,
}

impl ThinSvd {
    pub fn reconstruct(&self) -> DenseMatrix {
        let mut us = self.u.clone();
        for (j, &s) in self.sigma.iter().enumerate() {
            us.col_mut(j).iter_mut().for_each(|x| *x *= s);
        }
        us.matmul(&self.v.transpose())
    }
}

/// One-sided (Hestenes) Jacobi SVD.
///
/// Wide inputs are handled by decomposing the transpose. Singular values at
/// or below `max(n, s) * eps * sigma_max` are flushed to exact zero, and the
/// matching left singular vectors are completed to an orthonormal set.
pub fn thin_svd(m: &DenseMatrix) -> Result<ThinSvd> {
    check_finite(m.as_slice(), "thin_svd input")?;
    if m.cols() > m.rows() {
        let t = thin_svd(&m.transpose())?;
        return Ok(ThinSvd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        });
    }
    let (n, s) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut v = DenseMatrix::identity(s);

    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..s {
            for q in p + 1..s {
                let alpha = dot(a.col(p), a.col(p));
                let beta = dot(a.col(q), a.col(q));
                let gamma = dot(a.col(p), a.col(q));
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = c * t;
                rotate(&mut a, p, q, c, sn);
                rotate(&mut v, p, q, c, sn);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..s).map(|j| norm2(a.col(j))).collect();
    let mut order: Vec<usize> = (0..s).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let sigma_max = order.first().map_or(0.0, |&j| norms[j]);
    let flush = n.max(s) as f64 * f64::EPSILON * sigma_max;

    let mut sigma = Vec::with_capacity(s);
    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(s);
    let mut v_sorted = DenseMatrix::zeros(s, s);
    for (dst, &j) in order.iter().enumerate() {
        v_sorted.col_mut(dst).copy_from_slice(v.col(j));
        let sj = norms[j];
        if sj > flush && sj > 0.0 {
            sigma.push(sj);
            u_cols.push(a.col(j).iter().map(|x| x / sj).collect());
        } else {
            sigma.push(0.0);
            u_cols.push(vec![0.0; n]);
        }
    }

    // Re-orthonormalize in descending-sigma order; this only perturbs the
    // reconstruction at the eps * sigma_max level.
    let mut next_unit = 0;
    for j in 0..s {
        let (done, rest) = u_cols.split_at_mut(j);
        let w = &mut rest[0];
        let mut ok = false;
        if sigma[j] > 0.0 {
            ok = orthonormalize_against(w, done);
        }
        while !ok {
            w.iter_mut().for_each(|x| *x = 0.0);
            w[next_unit] = 1.0;
            next_unit += 1;
            ok = orthonormalize_against(w, done);
        }
    }

    let u = DenseMatrix::from_fn(n, s, |i, j| u_cols[j][i]);
    Ok(ThinSvd {
        u,
        sigma,
        v: v_sorted,
    })
}

fn rotate(m: &mut DenseMatrix, p: usize, q: usize, c: f64, s: f64) {
    for i in 0..m.rows() {
        let xp = m[(i, p)];
        let xq = m[(i, q)];
        m[(i, p)] = c * xp - s * xq;
        m[(i, q)] = s * xp + c * xq;
    }
}

/// Orthogonalizes `w` twice against `basis` and normalizes it. Returns false
/// when too little of `w` survives to define a new direction.
fn orthonormalize_against(w: &mut [f64], basis: &[Vec<f64>]) -> bool {
    let before = norm2(w);
    for _ in 0..2 {
        for b in basis {
            let h = dot(b, w);
            axpy(-h, b, w);
        }
    }
    let after = norm2(w);
    if after <= 1e-8 * before || after == 0.0 {
        return false;
    }
    w.iter_mut().for_each(|x| *x /= after);
    true
}
