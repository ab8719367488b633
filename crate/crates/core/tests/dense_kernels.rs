mod common;

use blockexp::dense::{expm, qr_thin, thin_svd};
use blockexp::DenseMatrix;
use common::*;
use proptest::prelude::*;

#[test]
fn qr_of_seeded_50x4() {
    let mut r = rng(11);
    let m = random_matrix(&mut r, 50, 4);
    let qr = qr_thin(&m, 1e-12).unwrap();
    assert_eq!(qr.kept_cols, vec![0, 1, 2, 3]);
    let recon = qr.q.matmul(&qr.r);
    assert!(recon.sub(&m).frobenius_norm() <= 1e-12 * m.frobenius_norm());
    assert!(qr.q.orthonormality_error() <= 1e-12);
    for i in 0..qr.r.rows() {
        for j in 0..i {
            assert_eq!(qr.r[(i, j)], 0.0);
        }
    }
}

#[test]
fn svd_matches_jacobi_eigen_oracle() {
    let mut r = rng(12);
    let m = random_matrix(&mut r, 30, 10);
    let svd = thin_svd(&m).unwrap();
    let ev = jacobi_eigenvalues(&m.transpose().matmul(&m));
    for (s, l) in svd.sigma.iter().zip(&ev) {
        let expect = l.max(0.0).sqrt();
        assert!((s - expect).abs() <= 1e-10 * expect, "{s} vs {expect}");
    }
    assert!(svd.reconstruct().sub(&m).frobenius_norm() <= 1e-12 * m.frobenius_norm());
    assert!(svd.u.orthonormality_error() <= 1e-12 * 10.0);
    assert!(svd.v.orthonormality_error() <= 1e-12 * 10.0);
}

#[test]
fn svd_of_rank_deficient_matrix_pads_zeros() {
    let mut r = rng(13);
    let a = random_matrix(&mut r, 12, 2);
    let b = random_matrix(&mut r, 2, 5);
    let svd = thin_svd(&a.matmul(&b)).unwrap();
    assert!(svd.sigma[1] > 1e-3);
    assert!(svd.sigma[2..].iter().all(|&s| s == 0.0), "{:?}", svd.sigma);
}

#[test]
fn expm_matches_taylor_oracle() {
    let mut r = rng(14);
    let m = random_matrix(&mut r, 8, 8).scaled(1.5);
    let e = expm(&m).unwrap();
    let t = taylor_expm(&m);
    let rel = e.sub(&t).frobenius_norm() / t.frobenius_norm();
    assert!(rel <= 1e-11, "{rel:e}");
}

#[test]
fn expm_of_stiff_diagonal() {
    let d = DenseMatrix::diag(&[-50.0, -1.0, 0.0, 2.0]);
    let e = expm(&d).unwrap();
    for (i, x) in [-50.0f64, -1.0, 0.0, 2.0].iter().enumerate() {
        assert!((e[(i, i)] - x.exp()).abs() <= 1e-14 * x.exp().max(1.0));
    }
}

fn seeded_matrix(seed: u64, rows: usize, cols: usize, scale: f64) -> DenseMatrix {
    let mut r = rng(seed);
    random_matrix(&mut r, rows, cols).scaled(scale)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn qr_reconstructs_and_is_orthonormal(seed in any::<u64>(), n in 4usize..40, b in 1usize..5) {
        let b = b.min(n);
        let m = seeded_matrix(seed, n, b, 1.0);
        let qr = qr_thin(&m, 1e-12).unwrap();
        prop_assert!(qr.q.orthonormality_error() <= 1e-12);
        let kept = DenseMatrix::from_columns(
            &qr.kept_cols.iter().map(|&j| m.col(j).to_vec()).collect::<Vec<_>>(),
        ).unwrap();
        let recon = qr.q.matmul(&qr.r);
        let recon_kept = DenseMatrix::from_columns(
            &qr.kept_cols.iter().map(|&j| recon.col(j).to_vec()).collect::<Vec<_>>(),
        ).unwrap();
        prop_assert!(recon_kept.sub(&kept).frobenius_norm() <= 1e-12 * m.frobenius_norm());
    }

    #[test]
    fn svd_invariants(seed in any::<u64>(), n in 2usize..30, s in 1usize..10) {
        let m = seeded_matrix(seed, n, s, 3.0);
        let svd = thin_svd(&m).unwrap();
        let k = svd.sigma.len() as f64;
        prop_assert!(svd.sigma.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(svd.sigma.iter().all(|&x| x >= 0.0));
        prop_assert!(svd.u.orthonormality_error() <= 1e-12 * k);
        prop_assert!(svd.v.orthonormality_error() <= 1e-12 * k);
        prop_assert!(svd.reconstruct().sub(&m).frobenius_norm() <= 1e-12 * m.frobenius_norm());
    }

    #[test]
    fn svd_agrees_with_eigen_oracle(seed in any::<u64>(), n in 10usize..30, s in 1usize..10) {
        let m = seeded_matrix(seed, n, s, 1.0);
        let svd = thin_svd(&m).unwrap();
        let ev = jacobi_eigenvalues(&m.transpose().matmul(&m));
        for (x, l) in svd.sigma.iter().zip(&ev) {
            let expect = l.max(0.0).sqrt();
            prop_assert!((x - expect).abs() <= 1e-10 * expect);
        }
    }

    #[test]
    fn expm_inverse_pair(seed in any::<u64>(), d in 1usize..20) {
        let raw = seeded_matrix(seed, d, d, 1.0);
        let m = raw.scaled(5.0 / raw.frobenius_norm());
        let prod = expm(&m).unwrap().matmul(&expm(&m.scaled(-1.0)).unwrap());
        prop_assert!(prod.sub(&DenseMatrix::identity(d)).frobenius_norm() <= 1e-10);
    }

    #[test]
    fn expm_semigroup(seed in any::<u64>(), d in 1usize..12, a in 0.0f64..1.5, b in 0.0f64..1.5) {
        let m = seeded_matrix(seed, d, d, 1.0);
        let lhs = expm(&m.scaled(a + b)).unwrap();
        let rhs = expm(&m.scaled(a)).unwrap().matmul(&expm(&m.scaled(b)).unwrap());
        prop_assert!(lhs.sub(&rhs).frobenius_norm() <= 1e-10 * lhs.frobenius_norm().max(1.0));
    }
}
