//! Brute-force reference solutions for checking the Krylov solver.

use crate::dense::{axpy, check_finite, expm, DenseMatrix};
use crate::error::{Error, Result};
use crate::operator::LinearOperator;
use crate::source_model::SourceTerm;

/// States of a reference integration on a requested output grid.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Number of integration steps actually taken.
    pub steps: usize,
    pub method: &'static str,
}

/// Classical fourth-order Runge–Kutta for `y' = −A y + g(t)`, `y(0) = v`.
///
/// Steps have length `t_end / steps`; a step is shortened whenever an output
/// time falls inside it, so every output time is hit exactly.
pub fn rk4_solve(
    op: &dyn LinearOperator,
    v: &[f64],
    g: &dyn SourceTerm,
    t_end: f64,
    steps: usize,
    output_times: &[f64],
) -> Result<OracleResult> {
    let n = op.dim();
    if v.len() != n || g.dim() != n {
        return Err(Error::Argument("dimension mismatch in rk4_solve".into()));
    }
    if steps == 0 || !(t_end > 0.0) {
        return Err(Error::Argument(format!("need steps >= 1 and t_end > 0, got {steps}, {t_end}")));
    }
    if output_times.windows(2).any(|w| w[1] < w[0])
        || output_times.iter().any(|&t| !(0.0..=t_end).contains(&t))
    {
        return Err(Error::Argument("output times must be sorted and inside [0, t_end]".into()));
    }
    check_finite(v, "initial value")?;

    let h = t_end / steps as f64;
    let node = |j: usize| t_end * j as f64 / steps as f64;
    let snap = 1e-9 * h;

    let mut stepper = Rk4::new(op, g);
    let mut y = v.to_vec();
    let mut t = 0.0;
    let mut next_node = 1;
    let mut taken = 0;
    let mut states = Vec::with_capacity(output_times.len());

    for &target in output_times {
        while next_node <= steps && node(next_node) < target - snap {
            let t_next = node(next_node);
            stepper.step(t, t_next - t, &mut y);
            taken += 1;
            t = t_next;
            next_node += 1;
            if y.iter().any(|x| !x.is_finite()) {
                return Err(Error::BlowUp { step: taken });
            }
        }
        if target > t {
            stepper.step(t, target - t, &mut y);
            taken += 1;
            t = target;
            if y.iter().any(|x| !x.is_finite()) {
                return Err(Error::BlowUp { step: taken });
            }
        }
        if next_node <= steps && (node(next_node) - t).abs() <= snap {
            next_node += 1;
        }
        states.push(y.clone());
    }

    Ok(OracleResult {
        times: output_times.to_vec(),
        states,
        steps: taken,
        method: "rk4-fixed-step",
    })
}

struct Rk4<'a> {
    op: &'a dyn LinearOperator,
    g: &'a dyn SourceTerm,
    k: [Vec<f64>; 4],
    stage: Vec<f64>,
    gbuf: Vec<f64>,
}

impl<'a> Rk4<'a> {
    fn new(op: &'a dyn LinearOperator, g: &'a dyn SourceTerm) -> Self {
        let n = op.dim();
        Rk4 {
            op,
            g,
            k: std::array::from_fn(|_| vec![0.0; n]),
            stage: vec![0.0; n],
            gbuf: vec![0.0; n],
        }
    }

    /// `out = −A y + g(t)`
    fn rhs(op: &dyn LinearOperator, g: &dyn SourceTerm, gbuf: &mut [f64], t: f64, y: &[f64], out: &mut [f64]) {
        op.apply(y, out);
        g.eval_into(t, gbuf);
        for (o, gi) in out.iter_mut().zip(gbuf.iter()) {
            *o = gi - *o;
        }
    }

    fn step(&mut self, t: f64, h: f64, y: &mut [f64]) {
        let [k1, k2, k3, k4] = &mut self.k;
        Self::rhs(self.op, self.g, &mut self.gbuf, t, y, k1);

        self.stage.copy_from_slice(y);
        axpy(0.5 * h, k1, &mut self.stage);
        Self::rhs(self.op, self.g, &mut self.gbuf, t + 0.5 * h, &self.stage, k2);

        self.stage.copy_from_slice(y);
        axpy(0.5 * h, k2, &mut self.stage);
        Self::rhs(self.op, self.g, &mut self.gbuf, t + 0.5 * h, &self.stage, k3);

        self.stage.copy_from_slice(y);
        axpy(h, k3, &mut self.stage);
        Self::rhs(self.op, self.g, &mut self.gbuf, t + h, &self.stage, k4);

        for i in 0..y.len() {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
}

/// `y(t) = e^{−tH} v + t φ₁(−tH) b`, the solution of `y' = −H y + b`, `y(0) = v`,
/// read off one exponential of the `(d+1) x (d+1)` matrix `[[−H, b], [0, 0]]`.
pub fn constant_source_exact(h: &DenseMatrix, b: &[f64], v: &[f64], t: f64) -> Result<Vec<f64>> {
    let d = h.rows();
    if !h.is_square() || b.len() != d || v.len() != d {
        return Err(Error::Argument("dimension mismatch in constant_source_exact".into()));
    }
    if t == 0.0 {
        return Ok(v.to_vec());
    }
    let mut aug = DenseMatrix::zeros(d + 1, d + 1);
    aug.set_block(0, 0, &h.scaled(-t));
    for (i, &bi) in b.iter().enumerate() {
        aug[(i, d)] = t * bi;
    }
    let e = expm(&aug)?;
    let mut start = v.to_vec();
    start.push(1.0);
    let mut y = e.matvec(&start);
    y.truncate(d);
    Ok(y)
}
