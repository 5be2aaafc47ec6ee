mod common;

use common::{random_frame, random_h, random_map, random_real_terms, random_symmetric};
use crnf::hypersurface::{Hypersurface, SemidefCase};
use crnf::linalg::{fro, from_real_diag, takagi, CMatrix};
use crnf::map::apply_map;
use crnf::partial_nf::{
    classify_semidefinite, detect_generic, generic_partial_nf, is_third_order_form, levi_matrix, partial_nf,
    target_form, third_order_form, transform_h, PartialCase, SemidefKind,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn disturbed(m: &Hypersurface, seed: u64) -> Hypersurface {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let extra = random_real_terms(m.n(), m.trunc(), 4, m.trunc() as u32, 4, &mut rng);
    let m = m.plus(&extra).unwrap();
    apply_map(&m, &random_map(m.n(), m.trunc(), 0.5, &mut rng)).unwrap()
}

#[test]
fn regular_form_removes_pure_terms() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 1..=3 {
        let phi = &crnf::hypersurface::hermitian_form(n, n, 7) + &random_real_terms(n, 7, 2, 7, 12, &mut rng);
        let m = Hypersurface::new(phi).unwrap();
        let (out, map) = crnf::partial_nf::to_regular(&m).unwrap();
        assert!(crnf::partial_nf::is_regular(&out, 1e-10), "{:?}", out.phi().pure_part());
        assert!(apply_map(&m, &map).unwrap().phi().dist(out.phi()) < 1e-9);
    }
}

#[test]
fn third_order_shapes() {
    let sphere = Hypersurface::sphere(3, 6);
    let t = third_order_form(&sphere).unwrap();
    assert_eq!((t.r, t.s, t.h.len()), (3, 0, 0));
    assert!(t.map.is_identity(1e-14));
    for (seed, (n, r, s)) in [(2, 1, 0), (3, 2, 0), (3, 1, 1), (4, 2, 1), (3, 0, 2)].into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
        let mut phi = crnf::hypersurface::bracket(n, r, 6);
        for j in r..r + s {
            phi = &phi - &crnf::hypersurface::bracket(n, j + 1, 6);
            phi = &phi + &crnf::hypersurface::bracket(n, j, 6);
        }
        let phi = &phi + &random_real_terms(n, 6, 3, 6, 10, &mut rng);
        let m = disturbed(&Hypersurface::new(phi).unwrap(), 100 + seed as u64);
        let t = third_order_form(&m).unwrap();
        let (rr, ss) = if s > r { (s, r) } else { (r, s) };
        assert_eq!((t.r, t.s), (rr, ss));
        assert!(is_third_order_form(&t.m, t.r, t.s, 1e-9));
        assert!(apply_map(&m, &t.map).unwrap().phi().dist(t.m.phi()) < 1e-8);
    }
}

#[test]
fn trichotomy_hits_targets() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 2..=5 {
        for kind in [SemidefKind::I, SemidefKind::II, SemidefKind::III] {
            for _ in 0..5 {
                let h = random_h(n, kind, &mut rng);
                let c = classify_semidefinite(&h).unwrap();
                assert_eq!(c.kind, kind);
                let target = target_form(kind, &c.lambda);
                assert!(fro(&(&c.h_out - &target)) < 1e-9, "{kind:?} n={n}\n{}\n{}", c.h_out, target);
                // frame change keeps the Levi form
                let v = c.b.view((0, 0), (n - 1, n - 1)).into_owned();
                assert!(fro(&((&v * v.adjoint()).scale(c.a) - CMatrix::identity(n - 1, n - 1))) < 1e-9);
                assert!(c.b.view((n - 1, 0), (1, n - 1)).iter().all(|x| x.norm() == 0.0));
                assert!((c.lambda[0] - 1.0).abs() < 1e-12 || c.lambda.iter().all(|&l| l == 0.0));
                assert!(c.lambda.windows(2).all(|w| w[0] >= w[1] - 1e-12));
                if kind == SemidefKind::I {
                    assert_eq!(*c.lambda.last().unwrap(), 0.0);
                }
            }
        }
    }
}

#[test]
fn trichotomy_is_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in 2..=4 {
        for kind in [SemidefKind::I, SemidefKind::II, SemidefKind::III] {
            let h = random_h(n, kind, &mut rng);
            let c0 = classify_semidefinite(&h).unwrap();
            for _ in 0..4 {
                let (b, a) = random_frame(n, &mut rng);
                let c1 = classify_semidefinite(&transform_h(&h, &b, a)).unwrap();
                assert_eq!(c1.kind, c0.kind);
                for (x, y) in c0.lambda.iter().zip(&c1.lambda) {
                    assert!((x - y).abs() < 1e-7);
                }
            }
        }
    }
}

#[test]
fn n2_special_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for kind in [SemidefKind::I, SemidefKind::II, SemidefKind::III] {
        for _ in 0..5 {
            let c = classify_semidefinite(&random_h(2, kind, &mut rng)).unwrap();
            let ok: &[f64] = if kind == SemidefKind::I { &[0.0] } else { &[0.0, 1.0] };
            assert!(ok.iter().any(|v| (c.lambda[0] - v).abs() < 1e-12));
        }
    }
}

#[test]
fn generic_detection() {
    let m13 = Hypersurface::semidef_model(SemidefCase::III, &[0.5, 0.2], 5);
    let m12 = Hypersurface::semidef_model(SemidefCase::II, &[0.5, 0.2], 5);
    assert!(detect_generic(&m13).unwrap());
    assert!(!detect_generic(&m12).unwrap());
    assert!(detect_generic(&Hypersurface::sphere(3, 5)).is_err());
    assert!(detect_generic(&disturbed(&m13, 7)).unwrap());
    assert!(!detect_generic(&disturbed(&m12, 8)).unwrap());
}

#[test]
fn generic_nf_semidefinite() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n in [2usize, 3, 4] {
        let r = random_symmetric(n - 1, &mut rng);
        let model = Hypersurface::model(n - 1, &r, 6);
        let t = takagi(&r).unwrap();
        let expect: Vec<f64> = t.lambda.iter().map(|l| l / t.lambda[0]).collect();
        for seed in 0..3 {
            let m = disturbed(&model, 40 + seed);
            let res = generic_partial_nf(&m).unwrap();
            assert_eq!(res.case, PartialCase::Semidef(SemidefKind::III));
            let lambda = res.lambda.clone().unwrap();
            for (x, y) in lambda.iter().zip(&expect) {
                assert!((x - y).abs() < 1e-7, "{lambda:?} vs {expect:?}");
            }
            assert!(fro(&(res.rmat.as_ref().unwrap() - from_real_diag(&lambda))) < 1e-9);
            let expected_out = Hypersurface::model(n - 1, &from_real_diag(&lambda), 6);
            let out3 = res.m_out.phi().filter(|x| x.deg <= 3);
            assert!(out3.dist(expected_out.phi()) < 1e-9);
            assert!(apply_map(&m, &res.map).unwrap().phi().dist(res.m_out.phi()) < 1e-8);
            assert_eq!(res.aut_dim_bound, Some(crnf::partial_nf::aut_dim_bound(n, &lambda)));
        }
    }
}

#[test]
fn model_unchanged() {
    let m = Hypersurface::semidef_model(SemidefCase::III, &[1.0, 0.0, 0.0], 6);
    let res = generic_partial_nf(&m).unwrap();
    assert_eq!(res.lambda, Some(vec![1.0, 0.0, 0.0]));
    assert!(res.m_out.phi().dist(m.phi()) < 1e-12);
}

#[test]
fn generic_nf_indefinite() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for (n, r) in [(3usize, 1usize), (4, 2), (4, 1)] {
        let rm = random_symmetric(n - 1, &mut rng);
        let model = Hypersurface::model(r, &rm, 6);
        let m = disturbed(&model, 60 + n as u64);
        let res = generic_partial_nf(&m).unwrap();
        assert_eq!(res.case, PartialCase::Generic);
        let (rr, ss) = (r.max(n - 1 - r), r.min(n - 1 - r));
        assert_eq!((res.r, res.s), (rr, ss));
        let rout = res.rmat.clone().unwrap();
        let expected = Hypersurface::model(rr, &rout, 6);
        assert!(res.m_out.phi().filter(|x| x.deg <= 3).dist(expected.phi()) < 1e-9);
        assert!(is_third_order_form(&res.m_out, rr, ss, 1e-9));
    }
}

#[test]
fn semidefinite_families() {
    for (case, kind, lambda) in [
        (SemidefCase::I, SemidefKind::I, vec![1.0, 0.0]),
        (SemidefCase::I, SemidefKind::I, vec![1.0, 0.3, 0.0]),
        (SemidefCase::II, SemidefKind::II, vec![1.0, 0.4]),
        (SemidefCase::II, SemidefKind::II, vec![0.0, 0.0]),
        (SemidefCase::III, SemidefKind::III, vec![1.0, 0.7]),
    ] {
        let model = Hypersurface::semidef_model(case, &lambda, 5);
        let m = disturbed(&model, 80);
        let res = partial_nf(&m).unwrap();
        assert_eq!(res.case, PartialCase::Semidef(kind));
        let got = res.lambda.clone().unwrap();
        for (x, y) in got.iter().zip(&lambda) {
            assert!((x - y).abs() < 1e-7, "{case:?}: {got:?} vs {lambda:?}");
        }
        assert!(res.m_out.phi().filter(|x| x.deg <= 3).dist(model.phi()) < 1e-9);
        assert!(levi_matrix(&res.m_out).iter().all(|x| x.norm() < 1.0 + 1e-9));
    }
}
