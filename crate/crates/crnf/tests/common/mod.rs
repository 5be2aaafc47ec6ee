#![allow(dead_code)]

pub mod suites;

use crnf::linalg::CMatrix;
use crnf::map::FormalMap;
use crnf::partial_nf::SemidefKind;
use crnf::series::{c64, Mono, Series, Space, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rc(rng: &mut ChaCha8Rng) -> C64 {
    c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_symmetric(m: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let a = CMatrix::from_fn(m, m, |_, _| rc(rng));
    (&a + a.transpose()).scale(0.5)
}

pub fn random_unitary(m: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let a = CMatrix::from_fn(m, m, |_, _| rc(rng));
    a.qr().q()
}

/// Random weighted monomial exponents of degree `deg` in `nv` variables,
/// the last of which has weight 2.
fn random_exps(nv: usize, deg: u32, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let mut e = vec![0u32; nv];
    let mut d = 0;
    while d < deg {
        let v = rng.gen_range(0..nv);
        let w = if v == nv - 1 { 2 } else { 1 };
        if d + w <= deg {
            e[v] += 1;
            d += w;
        }
    }
    e
}

/// `count` random real terms of weighted degree in `lo..=hi`.
pub fn random_real_terms(n: usize, trunc: i32, lo: u32, hi: u32, count: usize, rng: &mut ChaCha8Rng) -> Series {
    let sp = Space::Mixed(n);
    let mut out = Series::zero(sp, trunc);
    for _ in 0..count {
        let deg = rng.gen_range(lo..=hi);
        let e = random_exps(2 * n + 1, deg, rng);
        if deg == 2 && e[2 * n] == 1 {
            continue;
        }
        let t = Series::monomial(sp, trunc, &e, rc(rng));
        out = &out + &(&t + &t.conj());
    }
    out
}

/// Random holomorphic map `z -> A z + b w + quadratic + ..., w -> c w + ...`
/// with real `c` and nonlinear coefficients of size `scale`.
pub fn random_map(n: usize, trunc: i32, scale: f64, rng: &mut ChaCha8Rng) -> FormalMap {
    let sp = Space::Holo(n);
    let a = CMatrix::identity(n, n) + CMatrix::from_fn(n, n, |_, _| rc(rng) * 0.4);
    let mut f: Vec<Series> = (0..n)
        .map(|i| {
            let mut t: Vec<(Mono, C64)> = (0..n).map(|j| (Mono::var(j), a[(i, j)])).collect();
            t.push((Mono::var(n), rc(rng) * scale));
            Series::from_terms(sp, trunc, t)
        })
        .collect();
    let mut g = Series::from_terms(sp, trunc, [(Mono::var(n), c64(rng.gen_range(0.5..1.5), 0.0))]);
    for _ in 0..3 * n {
        let i = rng.gen_range(0..n);
        let deg = rng.gen_range(2..=3);
        let e = random_exps(n + 1, deg, rng);
        f[i] = &f[i] + &Series::monomial(sp, trunc, &e, rc(rng) * scale);
        let deg = rng.gen_range(2..=4);
        let e = random_exps(n + 1, deg, rng);
        if e[..n].iter().sum::<u32>() > 0 {
            g = &g + &Series::monomial(sp, trunc, &e, rc(rng) * scale);
        }
    }
    FormalMap { f, g }
}

/// Random `B = [[V, c], [0, d]]` with `a V V^* = I`.
pub fn random_frame(n: usize, rng: &mut ChaCha8Rng) -> (CMatrix, f64) {
    let a: f64 = rng.gen_range(0.3..3.0);
    let v = random_unitary(n - 1, rng).unscale(a.sqrt());
    let mut b = CMatrix::zeros(n, n);
    b.view_mut((0, 0), (n - 1, n - 1)).copy_from(&v);
    for i in 0..n - 1 {
        b[(i, n - 1)] = rc(rng);
    }
    b[(n - 1, n - 1)] = rc(rng) + c64(0.5, 0.0);
    (b, a)
}

pub fn random_h(n: usize, kind: SemidefKind, rng: &mut ChaCha8Rng) -> CMatrix {
    let mut h = random_symmetric(n, rng);
    match kind {
        SemidefKind::III => {}
        SemidefKind::II => {
            for i in 0..n {
                h[(i, n - 1)] = C64::default();
                h[(n - 1, i)] = C64::default();
            }
        }
        SemidefKind::I => h[(n - 1, n - 1)] = C64::default(),
    }
    h
}

