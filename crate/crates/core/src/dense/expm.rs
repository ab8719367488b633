use super::{check_finite, DenseMatrix};
use crate::error::{Error, Result};

/// Numerator coefficients of the [13/13] Padé approximant to `exp`.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Scaled 1-norm bound before the Padé kernel is applied.
const SCALED_NORM_BOUND: f64 = 0.5;

/// Matrix exponential by scaling and squaring with a [13/13] Padé kernel.
///
/// The matrix is scaled by `2^-j` until its 1-norm is at most 0.5, the
/// approximant is evaluated there and squared `j` times.
pub fn expm(m: &DenseMatrix) -> Result<DenseMatrix> {
    if !m.is_square() || m.rows() == 0 {
        return Err(Error::Argument(format!(
            "expm needs a non-empty square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    check_finite(m.as_slice(), "expm input")?;
    let d = m.rows();
    if d == 1 {
        return Ok(DenseMatrix::diag(&[m[(0, 0)].exp()]));
    }

    let norm = m.norm_1();
    let squarings = if norm > SCALED_NORM_BOUND {
        (norm / SCALED_NORM_BOUND).log2().ceil() as i32
    } else {
        0
    };
    let a = m.scaled(2f64.powi(-squarings));

    let b = &PADE13;
    let id = DenseMatrix::identity(d);
    let a2 = a.matmul(&a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);

    let inner_u = a6
        .scaled(b[13])
        .add_scaled(b[11], &a4)
        .add_scaled(b[9], &a2);
    let u = a.matmul(
        &a6.matmul(&inner_u)
            .add_scaled(b[7], &a6)
            .add_scaled(b[5], &a4)
            .add_scaled(b[3], &a2)
            .add_scaled(b[1], &id),
    );
    let inner_v = a6
        .scaled(b[12])
        .add_scaled(b[10], &a4)
        .add_scaled(b[8], &a2);
    let v = a6
        .matmul(&inner_v)
        .add_scaled(b[6], &a6)
        .add_scaled(b[4], &a4)
        .add_scaled(b[2], &a2)
        .add_scaled(b[0], &id);

    let mut x = v.sub(&u).solve(&v.add_scaled(1.0, &u))?;
    for _ in 0..squarings {
        x = x.matmul(&x);
    }
    if !x.is_finite() {
        return Err(Error::Domain("matrix exponential overflowed".into()));
    }
    Ok(x)
}
