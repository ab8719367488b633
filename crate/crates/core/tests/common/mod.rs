//! Shared test oracles. Everything here is deliberately naive and independent
//! of the library's own factorizations.
#![allow(dead_code)]

use blockexp::dense::expm;
use blockexp::{DenseMatrix, FnSource};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries uniform in [-1, 1).
pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn unit(v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

/// Orthonormal columns by classical Gram–Schmidt applied twice.
pub fn orthonormalize(m: &DenseMatrix) -> DenseMatrix {
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for j in 0..m.cols() {
        let mut w = m.col(j).to_vec();
        for _ in 0..2 {
            for q in &cols {
                let h: f64 = q.iter().zip(&w).map(|(a, b)| a * b).sum();
                w.iter_mut().zip(q).for_each(|(x, qi)| *x -= h * qi);
            }
        }
        cols.push(unit(w));
    }
    DenseMatrix::from_columns(&cols).unwrap()
}

pub fn random_orthonormal(rng: &mut ChaCha8Rng, n: usize, m: usize) -> DenseMatrix {
    orthonormalize(&random_matrix(rng, n, m))
}

/// Dense `tridiag(-1, 2, -1) / h²`, `h = 1/(n+1)`.
pub fn dense_laplacian(n: usize) -> DenseMatrix {
    let h = 1.0 / (n as f64 + 1.0);
    let s = 1.0 / (h * h);
    DenseMatrix::from_fn(n, n, |i, j| {
        if i == j {
            2.0 * s
        } else if i.abs_diff(j) == 1 {
            -s
        } else {
            0.0
        }
    })
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, descending.
pub fn jacobi_eigenvalues(sym: &DenseMatrix) -> Vec<f64> {
    let n = sym.rows();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| sym.row(i)).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

/// `‖m‖₂` by power iteration on `mᵀm` with a Rayleigh-quotient estimate.
pub fn power_norm2(m: &DenseMatrix) -> f64 {
    let mtm = m.transpose().matmul(m);
    let n = mtm.rows();
    let mut x: Vec<f64> = unit((0..n).map(|i| 1.0 + 0.1 * (i as f64).sin()).collect());
    let mut lambda = 0.0;
    for _ in 0..20_000 {
        let y = mtm.matvec(&x);
        let rq: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if ny == 0.0 {
            return 0.0;
        }
        x = y.into_iter().map(|v| v / ny).collect();
        if (rq - lambda).abs() <= 1e-16 * rq.abs() {
            lambda = rq;
            break;
        }
        lambda = rq;
    }
    lambda.max(0.0).sqrt()
}

/// `exp(m)` by a 60-term Taylor series on `m / 2^j`, squared back.
pub fn taylor_expm(m: &DenseMatrix) -> DenseMatrix {
    let n = m.rows();
    let norm = m.norm_1();
    let j = if norm > 0.25 { (norm / 0.25).log2().ceil() as i32 } else { 0 };
    let a = m.scaled(2f64.powi(-j));
    let mut term = DenseMatrix::identity(n);
    let mut sum = DenseMatrix::identity(n);
    for k in 1..=60 {
        term = term.matmul(&a).scaled(1.0 / k as f64);
        sum = sum.add_scaled(1.0, &term);
    }
    for _ in 0..j {
        sum = sum.matmul(&sum);
    }
    sum
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Orthogonal projector onto the column span of `m`.
pub fn projector(m: &DenseMatrix) -> DenseMatrix {
    let q = orthonormalize(m);
    q.matmul(&q.transpose())
}

/// Double-double arithmetic, enough for an extended-precision normal-equations oracle.
#[derive(Clone, Copy, Debug)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    pub fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = Self::two_sum(self.hi, o.hi);
        let e = e + self.lo + o.lo;
        let (hi, lo) = Self::two_sum(s, e);
        Dd { hi, lo }
    }

    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        let e = e + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = Self::two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Dd::new(q1)));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul(Dd::new(q2)));
        let q3 = r.hi / o.hi;
        Dd::new(q1).add(Dd::new(q2)).add(Dd::new(q3))
    }
}

/// Least-squares polynomial coefficients (monomials in `x`, lowest first) via
/// normal equations solved by Gaussian elimination in double-double.
pub fn normal_equations_fit(x: &[f64], y: &[f64], degree: usize) -> Vec<f64> {
    let k = degree + 1;
    let pow = |xi: f64, p: usize| (0..p).fold(Dd::new(1.0), |acc, _| acc.mul(Dd::new(xi)));
    let mut a = vec![vec![Dd::new(0.0); k + 1]; k];
    for (&xi, &yi) in x.iter().zip(y) {
        for r in 0..k {
            let pr = pow(xi, r);
            for c in 0..k {
                a[r][c] = a[r][c].add(pr.mul(pow(xi, c)));
            }
            a[r][k] = a[r][k].add(pr.mul(Dd::new(yi)));
        }
    }
    for col in 0..k {
        let piv = (col..k)
            .max_by(|&i, &j| a[i][col].to_f64().abs().total_cmp(&a[j][col].to_f64().abs()))
            .unwrap();
        a.swap(col, piv);
        for r in col + 1..k {
            let f = a[r][col].div(a[col][col]);
            for c in col..=k {
                a[r][c] = a[r][c].sub(f.mul(a[col][c]));
            }
        }
    }
    let mut sol = vec![Dd::new(0.0); k];
    for r in (0..k).rev() {
        let mut acc = a[r][k];
        for c in r + 1..k {
            acc = acc.sub(a[r][c].mul(sol[c]));
        }
        sol[r] = acc.div(a[r][r]);
    }
    sol.into_iter().map(Dd::to_f64).collect()
}

/// Mildly stiff symmetric operator and a smooth three-mode source; needs
/// several restarts with two block steps per cycle.
pub fn restart_problem() -> (DenseMatrix, FnSource<impl Fn(f64, &mut [f64]) + Send + Sync>) {
    let n = 60;
    let a = DenseMatrix::from_fn(n, n, |i, j| {
        if i == j {
            2.0
        } else if i.abs_diff(j) == 1 {
            -0.9
        } else {
            0.0
        }
    });
    let g = FnSource::new(n, move |t, out: &mut [f64]| {
        for (i, o) in out.iter_mut().enumerate() {
            let x = (i as f64 + 1.0) / (n as f64 + 1.0);
            *o = (3.0 * x).sin() * t.cos() + x * x * (-t).exp() + (7.0 * x).cos() * (2.0 * t).sin();
        }
    });
    (a, g)
}

/// `[[−T A, B], [0, N]]` with `B[:, r−j] = j! T c_j`, built here from scratch.
pub fn direct_augmented_solve(a: &DenseMatrix, coeffs: &DenseMatrix, t_end: f64, t: f64) -> Vec<f64> {
    let n = a.rows();
    let r = coeffs.cols() - 1;
    let dim = n + r + 1;
    let mut aug = DenseMatrix::zeros(dim, dim);
    aug.set_block(0, 0, &a.scaled(-t_end));
    let mut fact = 1.0;
    for j in 0..=r {
        if j > 0 {
            fact *= j as f64;
        }
        for i in 0..n {
            aug[(i, n + r - j)] = fact * t_end * coeffs[(i, j)];
        }
    }
    for i in 0..r {
        aug[(n + i, n + i + 1)] = 1.0;
    }
    let e = expm(&aug.scaled(t / t_end)).unwrap();
    e.col(dim - 1)[..n].to_vec()
}

