use crnf::hypersurface::{bracket, hermitian_form, p_r};
use crnf::coeff::type_monomials;
use crnf::linalg::{fro, hermitian_eig, takagi, CMatrix};
use crnf::series::fischer::{fischer_decompose, fischer_decompose2};
use crnf::series::{c64, Series, Space};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{random_symmetric, rc};


pub fn random_of_type(n: usize, k: u32, l: u32, m: u32, rng: &mut ChaCha8Rng) -> Series {
    let sp = Space::Mixed(n);
    Series::from_terms(sp, 100, type_monomials(n, k, l, m).into_iter().map(|mo| (mo, rc(rng))))
}

/// Random homogeneous Fischer decompositions: reconstruction, side
/// condition and uniqueness under re-decomposition.
pub fn fischer_suite(count: usize, seed: u64) -> (f64, f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut res, mut side, mut fix): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for i in 0..count {
        let n = rng.gen_range(1..=3);
        let k = rng.gen_range(1..=3);
        let l = rng.gen_range(1..=3);
        let m = rng.gen_range(0..=1);
        let f = random_of_type(n, k, l, m, &mut rng);
        if i % 2 == 0 {
            let p = if k >= 2 && i % 4 == 0 {
                Series::monomial(Space::Mixed(n), 100, &{
                    let mut e = vec![0u32; 2 * n + 1];
                    e[n - 1] = 2;
                    e
                }, c64(1.0, 0.0))
            } else {
                hermitian_form(n, n, 100)
            };
            let d = fischer_decompose(&f, &p).unwrap();
            res = res.max(d.residual);
            side = side.max(d.side_residual);
            let again = fischer_decompose(&(&(&p * &d.g) + &d.h), &p).unwrap();
            fix = fix.max(again.g.dist(&d.g)).max(again.h.dist(&d.h));
        } else {
            let nn = n.max(2);
            let f = random_of_type(nn, 3, 2, m, &mut rng);
            let p = bracket(nn, nn - 1, 100);
            let rm = random_symmetric(nn - 1, &mut rng);
            let q = p_r(&rm, 100);
            let d = fischer_decompose2(&f, &p, &q).unwrap();
            res = res.max(d.residual);
            side = side.max(d.q_side_residual).max(d.s_side_residual);
            let again = fischer_decompose2(&(&(&(&p * &d.g1) + &(&q * &d.g2)) + &d.h), &p, &q).unwrap();
            fix = fix.max(again.h.dist(&d.h)).max((&(&p * &again.g1) + &(&q * &again.g2)).dist(&(&(&p * &d.g1) + &(&q * &d.g2))));
        }
    }
    (res, side, fix)
}


/// Worst Takagi errors over `count` random symmetric matrices with
/// `m <= 6`: `(factorization / (1 + |E|), unitarity, lambda vs eig(E Ebar))`.
pub fn takagi_suite(count: usize, seed: u64) -> (f64, f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut fac, mut uni, mut lam): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..count {
        let m = rng.gen_range(1..=6);
        let e = random_symmetric(m, &mut rng).scale(rng.gen_range(0.1..10.0));
        let t = takagi(&e).unwrap();
        let d = crnf::linalg::from_real_diag(&t.lambda);
        fac = fac.max(fro(&(&t.u * &e * t.u.transpose() - d)) / (1.0 + fro(&e)));
        uni = uni.max(fro(&(t.u.adjoint() * &t.u - CMatrix::identity(m, m))));
        // E Ebar is Hermitian when E is symmetric
        let eeb = &e * e.map(|z| z.conj());
        let (ev, _) = hermitian_eig(&((&eeb + eeb.adjoint()).scale(0.5))).unwrap();
        for (l, v) in t.lambda.iter().zip(ev) {
            lam = lam.max((l - v.max(0.0).sqrt()).abs());
        }
    }
    (fac, uni, lam)
}
