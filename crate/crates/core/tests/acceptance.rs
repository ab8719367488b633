//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p blockexp --test acceptance`.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use blockexp::dense::thin_svd;
use blockexp::krylov::DEFAULT_DEFLATION_TOL;
use blockexp::oracle::{constant_source_exact, rk4_solve};
use blockexp::projected::ProjectedProblem;
use blockexp::source_model::{chebyshev_grid, truncate_rank, RankRequest};
use blockexp::{
    block_arnoldi, residual_coeff, solve, solve_projected, ConstantSource, CsrMatrix, DenseMatrix,
    Error, FnSource, LinearOperator, PolySource, SolveMode, SolverConfig,
};
use common::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Max over the output grid of `‖y − y_ref‖` divided by the max of `‖y_ref‖`.
fn grid_relative_error(y: &[Vec<f64>], reference: &[Vec<f64>]) -> f64 {
    let num = y.iter().zip(reference).map(|(a, b)| norm(&sub(a, b))).fold(0.0, f64::max);
    let den = reference.iter().map(|b| norm(b)).fold(0.0, f64::max);
    num / den
}

fn svd_truncation_identities() -> Outcome {
    let mut r = rng(101);
    let g = random_matrix(&mut r, 100, 20);
    let svd = thin_svd(&g).unwrap();
    let (mut worst_2, mut worst_f) = (0.0f64, 0.0f64);
    for m in 1..=19 {
        let t = truncate_rank(&svd, RankRequest::Explicit(m)).unwrap();
        let diff = g.sub(&t.u.matmul(&DenseMatrix::diag(&t.sigma)).matmul(&t.v.transpose()));
        let two = power_norm2(&diff);
        worst_2 = worst_2.max((two - svd.sigma[m]).abs() / svd.sigma[m]);
        let fro_expect = svd.sigma[m..].iter().map(|s| s * s).sum::<f64>().sqrt();
        worst_f = worst_f.max((diff.frobenius_norm() - fro_expect).abs() / fro_expect);
        worst_f = worst_f.max((t.tail.fro - fro_expect).abs() / fro_expect);
        worst_2 = worst_2.max((t.tail.two_norm - svd.sigma[m]).abs() / svd.sigma[m]);
    }
    check(
        worst_2 <= 1e-9 && worst_f <= 1e-10,
        format!("max rel dev 2-norm {worst_2:.2e} (tol 1e-9), Frobenius {worst_f:.2e} (tol 1e-10)"),
    )
}

fn block_arnoldi_decomposition() -> Outcome {
    let a = CsrMatrix::laplacian_1d(400);
    let u = random_orthonormal(&mut rng(102), 400, 3);
    let dec = block_arnoldi(&a, &u, 10, DEFAULT_DEFLATION_TOL).unwrap();
    let res = dec.decomposition_residual(&a) / a.frobenius_norm();
    let orth = dec.extended_basis().orthonormality_error();
    let widths = dec.widths();
    let h = dec.hessenberg();
    let mut nonzero_below = 0usize;
    let mut row0 = 0;
    for (bi, &wi) in widths.iter().enumerate() {
        let mut col0 = 0;
        for (bj, &wj) in widths.iter().take(dec.steps()).enumerate() {
            if bi > bj + 1 {
                for rr in row0..row0 + wi {
                    for cc in col0..col0 + wj {
                        nonzero_below += usize::from(h[(rr, cc)] != 0.0);
                    }
                }
            }
            col0 += wj;
        }
        row0 += wi;
    }
    check(
        res <= 1e-10 && orth <= 1e-10 && nonzero_below == 0 && dec.steps() == 10,
        format!(
            "‖AV−VH‖_F/‖A‖_F {res:.2e}, ‖VᵀV−I‖_F {orth:.2e} (tol 1e-10), \
             nonzero entries below block subdiagonal {nonzero_below}, widths {widths:?}"
        ),
    )
}

fn residual_identity() -> Outcome {
    let mut r = rng(103);
    let t_end = 1.0;
    let a = random_matrix(&mut r, 20, 20).add_scaled(3.0, &DenseMatrix::identity(20));
    let u = random_orthonormal(&mut r, 20, 2);
    let coeffs = random_matrix(&mut r, 2, 4);
    let ps = PolySource::new(u.clone(), coeffs.clone(), t_end).unwrap();
    let dec = block_arnoldi(&a, &u, 3, DEFAULT_DEFLATION_TOL).unwrap();
    let lifted = ProjectedProblem::lift(&coeffs, dec.projected_dim());
    let sol = solve_projected(&dec.projected_matrix(), &lifted, t_end).unwrap();
    let basis = dec.basis();
    let next = dec.next_block().unwrap();
    let y = |t: f64| basis.matvec(&sol.evaluate(t).unwrap());
    let delta = 1e-5 * t_end;
    let mut worst: f64 = 0.0;
    for frac in [0.1, 0.5, 0.9] {
        let t = frac * t_end;
        let closed = next.matvec(&residual_coeff(&dec, &sol, t).unwrap());
        let dy: Vec<f64> = sub(&y(t + delta), &y(t - delta)).iter().map(|x| x / (2.0 * delta)).collect();
        let fd = sub(&sub(&ps.evaluate(t).unwrap(), &a.matvec(&y(t))), &dy);
        worst = worst.max(norm(&sub(&closed, &fd)));
    }
    check(worst <= 1e-6, format!("max |closed − central difference| {worst:.2e} (tol 1e-6)"))
}

fn scalar_analytic() -> Outcome {
    let a = DenseMatrix::diag(&[1.0]);
    let g = ConstantSource::new(vec![1.0]).unwrap();
    let sol = solve(&a, &[0.0], &g, 1.0, &SolverConfig::default()).unwrap();
    let err = (sol.final_state()[0] - (1.0 - (-1f64).exp())).abs();
    check(
        sol.converged() && err <= 1e-10,
        format!("|y(1) − (1 − e⁻¹)| {err:.2e} (tol 1e-10), converged {}", sol.converged()),
    )
}

fn oracle_equivalence_desk_scale() -> Outcome {
    let n = 400;
    let a = CsrMatrix::laplacian_1d(n);
    let mut r = rng(105);
    let w = unit(random_vec(&mut r, n));
    let z = unit(random_vec(&mut r, n));
    let g = FnSource::new(n, move |t, out: &mut [f64]| {
        let (s, c) = (t.sin(), (2.0 * t).cos());
        for i in 0..n {
            out[i] = s * w[i] + c * z[i];
        }
    });
    let v = vec![0.0; n];
    let sol = solve(&a, &v, &g, 1.0, &SolverConfig::default()).unwrap();
    let last = sol.history().last().unwrap();
    let mut detail = format!(
        "converged {}, cycles {}, final rel residual {:.2e} (tol 1e-8), last refit {:.2e}",
        sol.converged(),
        sol.history().len(),
        last.max_rel_residual,
        last.refit_residual
    );
    let mut pass = sol.converged();
    match rk4_solve(&a, &v, &g, 1.0, 100_000, sol.times()) {
        Ok(reference) => {
            let err = grid_relative_error(sol.snapshots(), &reference.states);
            pass &= err <= 1e-6;
            detail += &format!("; rel error vs RK4(1e5) {err:.2e} (tol 1e-6)");
        }
        Err(Error::BlowUp { step }) => {
            pass = false;
            let lambda_max = 4.0 * 401.0f64.powi(2) * (std::f64::consts::PI * 400.0 / 802.0).sin().powi(2);
            detail += &format!(
                "; RK4(1e5) blew up at step {step} (λ_max·h = {:.2})",
                lambda_max * 1e-5
            );
            if let Ok(stable) = rk4_solve(&a, &v, &g, 1.0, 1_000_000, sol.times()) {
                let err = grid_relative_error(sol.snapshots(), &stable.states);
                detail += &format!("; rel error vs stable RK4(1e6) {err:.2e}");
            }
        }
        Err(e) => {
            pass = false;
            detail += &format!("; oracle failed: {e}");
        }
    }
    check(pass, detail)
}

fn time_exactness() -> Outcome {
    let (n, t_end) = (30, 1.0);
    let mut r = rng(106);
    let a = random_matrix(&mut r, n, n).add_scaled(2.0, &DenseMatrix::identity(n));
    let u = random_orthonormal(&mut r, n, 2);
    let c = random_matrix(&mut r, 2, 4);
    let full = u.matmul(&c);
    let fc = full.clone();
    let g = FnSource::new(n, move |t, out: &mut [f64]| {
        let tau = t / t_end;
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..4).rev().fold(0.0, |acc, j| acc * tau + fc[(i, j)]);
        }
    });
    let cfg = SolverConfig { degree: 3, block_steps: 15, ..Default::default() };
    let sol = solve(&a, &vec![0.0; n], &g, t_end, &cfg).unwrap();
    let res = sol.history().last().unwrap().max_rel_residual;
    let direct: Vec<Vec<f64>> = sol
        .times()
        .iter()
        .map(|&t| if t == 0.0 { vec![0.0; n] } else { direct_augmented_solve(&a, &full, t_end, t) })
        .collect();
    let err = grid_relative_error(sol.snapshots(), &direct);
    check(
        sol.converged() && res <= 1e-11 && err <= 1e-9,
        format!("final rel residual {res:.2e} (tol 1e-11), rel error vs direct augmented exp {err:.2e} (tol 1e-9)"),
    )
}

fn restart_telescoping() -> Outcome {
    let (a, g) = restart_problem();
    let cfg = SolverConfig { block_steps: 2, mode: SolveMode::Evaluator, ..Default::default() };
    let sol = solve(&a, &vec![0.0; a.dim()], &g, 1.0, &cfg).unwrap();
    let cycles = sol.cycles().unwrap();
    let grid = chebyshev_grid(cfg.samples, 1.0).unwrap();
    let mut worst_excess = f64::NEG_INFINITY;
    for c in 0..cycles.len().saturating_sub(1) {
        let refit = sol.history()[c + 1].refit_residual;
        for &t in grid.iter() {
            let gap = norm(&sub(&cycles[c + 1].source().evaluate(t).unwrap(), &cycles[c].residual(t).unwrap()));
            worst_excess = worst_excess.max(gap - refit);
        }
    }
    let last = sol.history().last().unwrap().max_rel_residual;
    check(
        cycles.len() >= 3 && worst_excess <= 1e-12 && sol.converged() && last <= cfg.tol,
        format!(
            "cycles {}, max(gap − refit) {worst_excess:.2e} (tol 1e-12), final rel residual {last:.2e} (tol {:.0e})",
            cycles.len(),
            cfg.tol
        ),
    )
}

fn oracle_self_check() -> Outcome {
    let mut r = rng(108);
    let a = random_matrix(&mut r, 10, 10).add_scaled(2.0, &DenseMatrix::identity(10));
    let b = random_vec(&mut r, 10);
    let v = random_vec(&mut r, 10);
    let src = ConstantSource::new(b.clone()).unwrap();
    let exact = constant_source_exact(&a, &b, &v, 1.0).unwrap();
    let err = |steps| norm(&sub(&rk4_solve(&a, &v, &src, 1.0, steps, &[1.0]).unwrap().states[0], &exact));
    let ratio = err(40) / err(80);
    check((14.0..=18.0).contains(&ratio), format!("error ratio under step doubling {ratio:.3} (range [14, 18])"))
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome, Duration);
    let criteria: [Criterion; 8] = [
        ("1 SVD truncation identities", svd_truncation_identities, Duration::from_secs(5)),
        ("2 block Arnoldi decomposition", block_arnoldi_decomposition, Duration::from_secs(2)),
        ("3 residual identity", residual_identity, Duration::from_secs(2)),
        ("4 scalar analytic end-to-end", scalar_analytic, Duration::from_secs(1)),
        ("5 oracle equivalence at desk scale", oracle_equivalence_desk_scale, Duration::from_secs(60)),
        ("6 time-exactness", time_exactness, Duration::from_secs(5)),
        ("7 restart telescoping", restart_telescoping, Duration::from_secs(30)),
        ("8 oracle self-check", oracle_self_check, Duration::from_secs(5)),
    ];
    let mut failures = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            check(false, format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let pass = outcome.pass && elapsed <= budget;
        failures += usize::from(!pass);
        println!(
            "{} criterion {name}: {}; runtime {:.2} s (limit {} s)",
            if pass { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criterion(s) failed");
        ExitCode::FAILURE
    }
}
