use crnf::cr_tensors::{
    cubic_form, e_spaces, e_spaces_gradient, e_spaces_twisted, levi_form, nondegeneracy, psi, third_tensor,
    FrameTwist, GenericSubmanifold,
};
use crnf::hypersurface::{Hypersurface, SemidefCase};
use crnf::linalg::from_real_diag;
use crnf::series::{c64, Series, Space, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// im w = sum eps|z|^2 + 2 Re(h_{ab g} zb^a zb^b z^g) + random O(4), with
/// `g` over the Levi kernel.
fn random_third_order_form(n: usize, r: usize, s: usize, rng: &mut ChaCha8Rng) -> (Hypersurface, Vec<C64>) {
    let tr = 6;
    let sp = Space::Mixed(n);
    let z = |i: usize| Series::var(sp, tr, i);
    let mut phi = Series::zero(sp, tr);
    for j in 0..r + s {
        let e = if j < r { 1.0 } else { -1.0 };
        phi = &phi + &(&z(j) * &z(n + j)).scale_re(e);
    }
    let k = r + s;
    let mut h = vec![c64(0.0, 0.0); n * n * (n - k)];
    for a in 0..n {
        for b in a..n {
            for g in k..n {
                let c = c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                h[(a * n + b) * (n - k) + g - k] = c;
                h[(b * n + a) * (n - k) + g - k] = c;
            }
        }
    }
    let mut cubic = Series::zero(sp, tr);
    for a in 0..n {
        for b in 0..n {
            for g in k..n {
                let c = h[(a * n + b) * (n - k) + g - k];
                cubic = &cubic + &(&(&z(n + a) * &z(n + b)) * &z(g)).scale(c);
            }
        }
    }
    phi = &phi + &(&cubic + &cubic.conj());
    for _ in 0..6 {
        let mut e = vec![0u32; 2 * n + 1];
        let deg = rng.gen_range(4..=6);
        let mut d = 0;
        while d < deg {
            let v = rng.gen_range(0..2 * n + 1);
            let w = if v == 2 * n { 2 } else { 1 };
            if d + w <= deg {
                e[v] += 1;
                d += w;
            }
        }
        let t = Series::monomial(sp, tr, &e, c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        phi = &phi + &(&t + &t.conj());
    }
    (Hypersurface::new(phi).unwrap(), h)
}

#[test]
fn model_tensors_lambda_one_half() {
    let h = Hypersurface::semidef_model(SemidefCase::III, &[1.0, 0.5], 6);
    let g = levi_form(&h).unwrap().matrix(0, 0);
    assert!((g - from_real_diag(&[1.0, 1.0, 0.0])).norm() < 1e-9);
    let t = third_tensor(&h).unwrap();
    assert_eq!(t.f_dim, 1);
    assert!((t.matrix(0, 0) - from_real_diag(&[1.0, 0.5, 1.0])).norm() < 1e-9);
    assert!(t.symmetry_defect() < 1e-9);
    let q = cubic_form(&h).unwrap().matrix(0, 0);
    assert!((q - t.matrix(0, 0).scale(0.5).map(|x| x * c64(0.0, 1.0))).norm() < 1e-8);
}

#[test]
fn cubic_form_matches_on_third_order_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (n, r, s) in [(2, 1, 0), (3, 2, 0), (3, 1, 1), (3, 1, 0)] {
        let (m, hh) = random_third_order_form(n, r, s, &mut rng);
        let t = third_tensor(&m).unwrap();
        let q = cubic_form(&m).unwrap();
        let k = r + s;
        assert_eq!(t.f_dim, n - k);
        for a in 0..n {
            for b in 0..n {
                for g in 0..n - k {
                    let want = hh[(a * n + b) * (n - k) + g];
                    assert!((t.get(&[a, b], g, 0) - want).norm() < 1e-9);
                    assert!((q.get(&[a, b], g, 0) - want * c64(0.0, 0.5)).norm() < 1e-8, "{n} {r} {s}");
                }
            }
        }
    }
}

#[test]
fn spans_agree_across_frames() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..20 {
        let (n, d) = [(1, 1), (2, 1), (2, 2), (3, 1)][i % 4];
        let m = GenericSubmanifold::random(n, d, 6, 5, &mut rng);
        let tw = FrameTwist::random(&m, &mut rng);
        let a = e_spaces_gradient(&m, 3).unwrap();
        let b = e_spaces_twisted(&m, 3, &tw).unwrap();
        let c = e_spaces(&m, 3).unwrap();
        for j in 0..=3 {
            assert!(a[j].max_angle(&b[j]) < 1e-8, "case {i}, j={j}: {} vs {}", a[j].dim(), b[j].dim());
            assert!(a[j].max_angle(&c[j]) < 1e-8);
        }
    }
}

#[test]
fn nondegeneracy_examples() {
    let sphere = GenericSubmanifold::from_hypersurface(&Hypersurface::sphere(3, 6));
    assert_eq!(nondegeneracy(&sphere, 3).unwrap(), Some(1));
    let model = GenericSubmanifold::from_hypersurface(&Hypersurface::semidef_model(SemidefCase::III, &[0.0], 8));
    assert_eq!(nondegeneracy(&model, 5).unwrap(), Some(2));
    let flat = GenericSubmanifold::from_hypersurface(&Hypersurface::flat(2, 8));
    assert_eq!(nondegeneracy(&flat, 5).unwrap(), None);
    let p3 = psi(&model, 3).unwrap();
    assert!(p3.trivial);
}
