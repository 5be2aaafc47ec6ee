mod common;

use common::{random_symmetric, rc};
use crnf::linalg::{
    fro, from_real_diag, hermitian_eig, i_rs, is_hat_u, is_o_r, lstsq, nullspace, rank, takagi,
    takagi_stabilizer_check, CMatrix,
};
use crnf::series::{c64, C64};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn real(rows: usize, v: &[f64]) -> CMatrix {
    CMatrix::from_row_iterator(rows, v.len() / rows, v.iter().map(|&x| c64(x, 0.0)))
}

fn random_hermitian(m: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let a = CMatrix::from_fn(m, m, |_, _| rc(rng));
    (&a + a.adjoint()).scale(0.5)
}

/// Roots of the characteristic polynomial of a Hermitian matrix of size
/// at most 3, in closed form, descending.
fn char_roots(a: &CMatrix) -> Vec<f64> {
    let m = a.nrows();
    let mut out = match m {
        1 => vec![a[(0, 0)].re],
        2 => {
            let tr = (a[(0, 0)] + a[(1, 1)]).re;
            let det = (a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)]).re;
            let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
            vec![tr / 2.0 + disc, tr / 2.0 - disc]
        }
        _ => {
            // trigonometric solution of the depressed cubic
            let q = (a.trace().re) / 3.0;
            let b = a - CMatrix::identity(3, 3).scale(q);
            let p = (fro(&b).powi(2) / 6.0).sqrt();
            if p < 1e-14 {
                return vec![q; 3];
            }
            let r = (b.scale(1.0 / p).determinant().re / 2.0).clamp(-1.0, 1.0);
            let phi = r.acos() / 3.0;
            let tau = 2.0 * std::f64::consts::PI / 3.0;
            vec![q + 2.0 * p * phi.cos(), q + 2.0 * p * (phi + tau).cos(), q + 2.0 * p * (phi + 2.0 * tau).cos()]
        }
    };
    out.sort_by(|x, y| y.partial_cmp(x).unwrap());
    out
}

#[test]
fn eig_examples() {
    assert_eq!(hermitian_eig(&CMatrix::identity(2, 2)).unwrap().0, vec![1.0, 1.0]);
    let (v, _) = hermitian_eig(&from_real_diag(&[3.0, -1.0])).unwrap();
    assert!((v[0] - 3.0).abs() < 1e-12 && (v[1] + 1.0).abs() < 1e-12);
    let (v, _) = hermitian_eig(&real(2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
    assert!((v[0] - 1.0).abs() < 1e-12 && (v[1] + 1.0).abs() < 1e-12);
    assert!(hermitian_eig(&real(2, &[0.0, 1.0, 2.0, 0.0])).is_err());
}

#[test]
fn eig_matches_characteristic_roots() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..300 {
        let m = 1 + i % 3;
        let a = random_hermitian(m, &mut rng);
        let (v, u) = hermitian_eig(&a).unwrap();
        for (x, y) in v.iter().zip(char_roots(&a)) {
            assert!((x - y).abs() < 1e-9, "{v:?}");
        }
        let d = CMatrix::from_diagonal(&DVector::from_iterator(m, v.iter().map(|&x| c64(x, 0.0))));
        assert!(fro(&(&u * d * u.adjoint() - &a)) < 1e-10 * (1.0 + fro(&a)));
    }
}

#[test]
fn takagi_examples() {
    let t = takagi(&from_real_diag(&[2.0, 1.0])).unwrap();
    assert_eq!(t.lambda, vec![2.0, 1.0]);
    let e = real(2, &[0.0, 1.0, 1.0, 0.0]);
    let t = takagi(&e).unwrap();
    assert!((t.lambda[0] - 1.0).abs() < 1e-12 && (t.lambda[1] - 1.0).abs() < 1e-12);
    assert!(fro(&(&t.u * &e * t.u.transpose() - CMatrix::identity(2, 2))) < 1e-10);
    let t = takagi(&CMatrix::zeros(3, 3)).unwrap();
    assert_eq!(t.lambda, vec![0.0; 3]);
    assert!(fro(&(t.u.adjoint() * &t.u - CMatrix::identity(3, 3))) < 1e-12);
    assert!(takagi(&real(2, &[0.0, 1.0, 2.0, 0.0])).is_err());
}

#[test]
fn takagi_suite_500() {
    let (fac, uni, lam) = common::suites::takagi_suite(500, 1);
    assert!(fac < 1e-9 && uni < 1e-10 && lam < 1e-9, "{fac:e} {uni:e} {lam:e}");
}

#[test]
fn takagi_rank_deficient_and_repeated() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for d in [vec![1.0, 1.0, 0.0], vec![2.0, 0.0, 0.0], vec![1.5, 1.5, 1.5], vec![3.0, 1.0, 1.0, 0.0]] {
        let m = d.len();
        let v = common::random_unitary(m, &mut rng);
        let e = v.transpose() * from_real_diag(&d) * &v;
        let t = takagi(&e).unwrap();
        for (x, y) in t.lambda.iter().zip(&d) {
            assert!((x - y).abs() < 1e-10, "{:?} vs {d:?}", t.lambda);
        }
        assert!(fro(&(&t.u * &e * t.u.transpose() - from_real_diag(&t.lambda))) < 1e-10);
        assert!(fro(&(t.u.adjoint() * &t.u - CMatrix::identity(m, m))) < 1e-10);
    }
}

#[test]
fn takagi_scale_equivariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let m = rng.gen_range(1..=5);
        let e = random_symmetric(m, &mut rng);
        let t = rng.gen_range(0.01..100.0);
        let a = takagi(&e).unwrap().lambda;
        let b = takagi(&e.scale(t)).unwrap().lambda;
        for (x, y) in a.iter().zip(&b) {
            assert!((t * x - y).abs() < 1e-9 * (1.0 + t));
        }
    }
}

#[test]
fn stabilizer_examples() {
    assert!(takagi_stabilizer_check(&CMatrix::identity(3, 3), &[2.0, 1.0, 0.0]));
    let th: f64 = 0.7;
    let rot = real(2, &[th.cos(), -th.sin(), th.sin(), th.cos()]);
    assert!(takagi_stabilizer_check(&rot, &[1.0, 1.0]));
    let swap = real(2, &[0.0, 1.0, 1.0, 0.0]);
    assert!(!takagi_stabilizer_check(&swap, &[2.0, 1.0]));
    // a unitary block on the zero values
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let v = common::random_unitary(2, &mut rng);
    let mut u = CMatrix::identity(3, 3);
    u.view_mut((1, 1), (2, 2)).copy_from(&v);
    assert!(takagi_stabilizer_check(&u, &[1.0, 0.0, 0.0]));
}

#[test]
fn group_membership() {
    assert_eq!(is_hat_u(&CMatrix::identity(3, 3), 2, 1), Some(1));
    assert_eq!(is_hat_u(&real(2, &[0.0, 1.0, 1.0, 0.0]), 1, 1), Some(-1));
    assert_eq!(is_hat_u(&from_real_diag(&[2.0, 1.0]), 2, 0), None);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    assert_eq!(is_hat_u(&common::random_unitary(3, &mut rng), 3, 0), Some(1));

    let r = from_real_diag(&[1.0, 0.0]);
    assert!(is_o_r(&CMatrix::identity(2, 2), &r));
    let th: f64 = 1.1;
    let rot = real(2, &[th.cos(), -th.sin(), th.sin(), th.cos()]);
    assert!(is_o_r(&rot, &CMatrix::identity(2, 2)));
    assert!(!is_o_r(&from_real_diag(&[2.0, 1.0]), &r));
    assert!(i_rs(1, 2).trace() == c64(-1.0, 0.0));
}

#[test]
fn rank_and_least_squares() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let (m, n) = (rng.gen_range(1..8), rng.gen_range(1..8));
        let k = rng.gen_range(0..=m.min(n));
        let l = CMatrix::from_fn(m, k, |_, _| rc(&mut rng));
        let r = CMatrix::from_fn(k, n, |_, _| rc(&mut rng));
        let a = l * r;
        assert_eq!(rank(&a, 1e-9), k);
        let ns = nullspace(&a, 1e-9);
        assert_eq!(ns.ncols(), n - k);
        assert!(fro(&(&a * &ns)) < 1e-10);
        // consistent right-hand side: exact solution, orthogonal to the kernel
        let x0 = DVector::<C64>::from_fn(n, |_, _| rc(&mut rng));
        let b = &a * &x0;
        let x = lstsq(&a, &b, 1e-12);
        assert!((&a * &x - &b).norm() < 1e-10 * (1.0 + b.norm()));
        assert!((ns.adjoint() * &x).norm() < 1e-10 * (1.0 + x.norm()));
    }
}
