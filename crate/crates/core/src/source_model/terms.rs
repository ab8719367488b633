//! Source terms `g: [0, T] → Rⁿ`.

use crate::dense::check_finite;
use crate::error::{Error, Result};

/// A vector-valued function of time.
pub trait SourceTerm: Send + Sync {
    fn dim(&self) -> usize;

    /// Writes `g(t)` into `out` (length `dim()`).
    fn eval_into(&self, t: f64, out: &mut [f64]);

    fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.eval_into(t, &mut out);
        out
    }
}

impl<T: SourceTerm + ?Sized> SourceTerm for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval_into(&self, t: f64, out: &mut [f64]) {
        (**self).eval_into(t, out)
    }
}

impl<T: SourceTerm + ?Sized> SourceTerm for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval_into(&self, t: f64, out: &mut [f64]) {
        (**self).eval_into(t, out)
    }
}

/// `g(t) = c`.
#[derive(Debug, Clone)]
pub struct ConstantSource {
    value: Vec<f64>,
}

impl ConstantSource {
    pub fn new(value: Vec<f64>) -> Result<Self> {
        check_finite(&value, "constant source")?;
        Ok(ConstantSource { value })
    }
}

impl SourceTerm for ConstantSource {
    fn dim(&self) -> usize {
        self.value.len()
    }
    fn eval_into(&self, _t: f64, out: &mut [f64]) {
        out.copy_from_slice(&self.value);
    }
}

/// `g(t) = sin(ω t) · a`.
#[derive(Debug, Clone)]
pub struct SinusoidSource {
    amplitude: Vec<f64>,
    omega: f64,
}

impl SinusoidSource {
    pub fn new(amplitude: Vec<f64>, omega: f64) -> Result<Self> {
        check_finite(&amplitude, "sinusoid amplitude")?;
        if !omega.is_finite() {
            return Err(Error::Domain(format!("sinusoid frequency {omega}")));
        }
        Ok(SinusoidSource { amplitude, omega })
    }
}

impl SourceTerm for SinusoidSource {
    fn dim(&self) -> usize {
        self.amplitude.len()
    }
    fn eval_into(&self, t: f64, out: &mut [f64]) {
        let s = (self.omega * t).sin();
        for (o, a) in out.iter_mut().zip(&self.amplitude) {
            *o = s * a;
        }
    }
}

/// `g(t) = Σ_i tⁱ c_i`, one coefficient vector per power, lowest first.
#[derive(Debug, Clone)]
pub struct PolynomialSource {
    coeffs: Vec<Vec<f64>>,
}

impl PolynomialSource {
    pub fn new(coeffs: Vec<Vec<f64>>) -> Result<Self> {
        let n = coeffs
            .first()
            .ok_or_else(|| Error::EmptyInput("polynomial source without coefficients".into()))?
            .len();
        if coeffs.iter().any(|c| c.len() != n) {
            return Err(Error::Argument("polynomial coefficient rows differ in length".into()));
        }
        for c in &coeffs {
            check_finite(c, "polynomial coefficients")?;
        }
        Ok(PolynomialSource { coeffs })
    }
}

impl SourceTerm for PolynomialSource {
    fn dim(&self) -> usize {
        self.coeffs[0].len()
    }
    fn eval_into(&self, t: f64, out: &mut [f64]) {
        out.fill(0.0);
        for c in self.coeffs.iter().rev() {
            for (o, ci) in out.iter_mut().zip(c) {
                *o = *o * t + ci;
            }
        }
    }
}

/// Tabulated source interpolated by a natural cubic spline in each component.
///
/// Evaluating at a knot returns the tabulated row unchanged. Outside the
/// table range the boundary cubic pieces are extended.
#[derive(Debug, Clone)]
pub struct TableSource {
    times: Vec<f64>,
    values: Vec<Vec<f64>>,
    // second derivatives at the knots, same layout as `values`
    curvature: Vec<Vec<f64>>,
}

impl TableSource {
    pub fn new(times: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::EmptyInput("table source without rows".into()));
        }
        if times.len() != values.len() {
            return Err(Error::Argument("table times and rows differ in count".into()));
        }
        let n = values[0].len();
        if n == 0 || values.iter().any(|r| r.len() != n) {
            return Err(Error::Argument("table rows must share a non-zero width".into()));
        }
        check_finite(&times, "table times")?;
        for row in &values {
            check_finite(row, "table values")?;
        }
        if let Some(w) = times.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::Argument(format!(
                "table times not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        let curvature = natural_spline_curvature(&times, &values);
        Ok(TableSource {
            times,
            values,
            curvature,
        })
    }

    /// Time span covered by the table.
    pub fn span(&self) -> (f64, f64) {
        (self.times[0], *self.times.last().unwrap())
    }
}

impl SourceTerm for TableSource {
    fn dim(&self) -> usize {
        self.values[0].len()
    }

    fn eval_into(&self, t: f64, out: &mut [f64]) {
        let k = self.times.len();
        if let Ok(i) = self.times.binary_search_by(|x| x.total_cmp(&t)) {
            out.copy_from_slice(&self.values[i]);
            return;
        }
        if k == 1 {
            out.copy_from_slice(&self.values[0]);
            return;
        }
        let i = self.times.partition_point(|&x| x < t).clamp(1, k - 1) - 1;
        let (x0, x1) = (self.times[i], self.times[i + 1]);
        let h = x1 - x0;
        let (a, b) = (x1 - t, t - x0);
        for (c, o) in out.iter_mut().enumerate() {
            let (y0, y1) = (self.values[i][c], self.values[i + 1][c]);
            let (m0, m1) = (self.curvature[i][c], self.curvature[i + 1][c]);
            *o = m0 * a * a * a / (6.0 * h)
                + m1 * b * b * b / (6.0 * h)
                + (y0 / h - m0 * h / 6.0) * a
                + (y1 / h - m1 * h / 6.0) * b;
        }
    }
}

fn natural_spline_curvature(times: &[f64], values: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = times.len();
    let n = values[0].len();
    let mut curv = vec![vec![0.0; n]; k];
    if k < 3 {
        return curv;
    }
    let h: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
    // Thomas algorithm on the interior knots 1..k-1.
    let m = k - 2;
    for c in 0..n {
        let mut diag = vec![0.0; m];
        let mut rhs = vec![0.0; m];
        for r in 0..m {
            let i = r + 1;
            diag[r] = 2.0 * (h[i - 1] + h[i]);
            rhs[r] = 6.0
                * ((values[i + 1][c] - values[i][c]) / h[i]
                    - (values[i][c] - values[i - 1][c]) / h[i - 1]);
        }
        for r in 1..m {
            let w = h[r] / diag[r - 1];
            diag[r] -= w * h[r];
            rhs[r] -= w * rhs[r - 1];
        }
        let mut next = 0.0;
        for r in (0..m).rev() {
            let upper = if r + 1 < m { h[r + 1] } else { 0.0 };
            next = (rhs[r] - upper * next) / diag[r];
            curv[r + 1][c] = next;
        }
    }
    curv
}

/// Source backed by a closure.
pub struct FnSource<F> {
    dim: usize,
    f: F,
}

impl<F> FnSource<F>
where
    F: Fn(f64, &mut [f64]) + Send + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        FnSource { dim, f }
    }
}

impl<F> SourceTerm for FnSource<F>
where
    F: Fn(f64, &mut [f64]) + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval_into(&self, t: f64, out: &mut [f64]) {
        (self.f)(t, out)
    }
}
