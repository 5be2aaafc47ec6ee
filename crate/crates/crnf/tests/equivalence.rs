mod common;

use common::random_real_terms;
use crnf::equivalence::{equivalent_to_degree, invariants_signature, random_allowed_map, search_normalizations};
use crnf::full_nf::{normal_form, validate_p, NormalizationP};
use crnf::hypersurface::{Hypersurface, SemidefCase};
use crnf::linalg::{from_real_diag, CMatrix};
use crnf::map::{apply_map, FormalMap};
use crnf::normal_space::project_normal;
use crnf::series::c64;
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn disturbed(rmat: &CMatrix, trunc: i32, seed: u64) -> Hypersurface {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rmat.nrows() + 1;
    let extra = random_real_terms(n, trunc, 4, trunc as u32, 10, &mut rng).scale_re(0.3);
    Hypersurface::model(n - 1, rmat, trunc).plus(&extra).unwrap()
}

#[test]
fn signature_examples() {
    let m = Hypersurface::semidef_model(SemidefCase::III, &[0.5], 6);
    let a = CMatrix::from_row_slice(2, 2, &[c64(2.0, 0.0), c64(0.3, 0.1), c64(0.1, 0.0), c64(1.5, -0.2)]);
    let copy = apply_map(&m, &FormalMap::linear(&a, &DVector::zeros(2), c64(3.0, 0.0), 6)).unwrap();
    let (sa, sb) = (invariants_signature(&m).unwrap(), invariants_signature(&copy).unwrap());
    assert!(sa.matches(&sb, 1e-9), "{sa:?} {sb:?}");

    let other = Hypersurface::semidef_model(SemidefCase::II, &[0.5], 6);
    assert_ne!(invariants_signature(&other).unwrap().case, sa.case);

    let sphere = Hypersurface::sphere(2, 6);
    let ss = invariants_signature(&sphere).unwrap();
    assert!(!ss.matches(&sa, 1e-9));
    assert_ne!((ss.r, ss.s), (sa.r, sa.s));
}

#[test]
fn mismatch_skips_comparison() {
    let id = NormalizationP::identity(2);
    let a = Hypersurface::model(1, &from_real_diag(&[0.5]), 6);
    let b = Hypersurface::model(1, &from_real_diag(&[0.2]), 6);
    let rep = equivalent_to_degree(&a, &b, &id, &id, 6).unwrap();
    assert!(!rep.invariants_match && !rep.normal_forms_match);
    assert!(rep.max_deviation.is_none());
}

#[test]
fn normal_space_bump_is_detected() {
    let rmat = from_real_diag(&[0.5]);
    let m = disturbed(&rmat, 6, 9);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let raw = random_real_terms(2, 6, 4, 4, 8, &mut rng);
    let (bump, _) = project_normal(&raw, 1, &rmat).unwrap();
    let bump = bump.scale_re(0.01 / bump.max_abs());
    let id = NormalizationP::identity(2);
    let base = normal_form(&m, &id, 6).unwrap();
    // bump the normal form itself, so the bump is the only difference
    let bumped = base.m_out.plus(&bump).unwrap();
    let rep = equivalent_to_degree(&base.m_out, &bumped, &id, &id, 6).unwrap();
    assert!(rep.invariants_match && !rep.normal_forms_match);
    assert!((rep.max_deviation.unwrap() - 0.01).abs() < 1e-9, "{:?}", rep.max_deviation);
}

#[test]
fn random_allowed_map_basics() {
    let rmat = from_real_diag(&[0.5]);
    let a = random_allowed_map(1, &rmat, 42, 0.5, 6).unwrap();
    let b = random_allowed_map(1, &rmat, 42, 0.5, 6).unwrap();
    assert_eq!(a.map, b.map);
    assert_eq!(serde_json::to_string(&a.p.to_json()).unwrap(), serde_json::to_string(&b.p.to_json()).unwrap());
    let c = random_allowed_map(1, &rmat, 43, 0.5, 6).unwrap();
    assert_ne!(a.map, c.map);
    let z = random_allowed_map(1, &rmat, 42, 0.0, 6).unwrap();
    assert!(z.map.is_identity(1e-14));
    assert!(random_allowed_map(1, &rmat, 1, -1.0, 6).is_err());
    for (r, rm) in [(1, from_real_diag(&[0.0])), (1, from_real_diag(&[2.0])), (2, from_real_diag(&[1.0, 1.0])), (2, from_real_diag(&[0.0, 0.0]))] {
        for seed in 0..20 {
            let am = random_allowed_map(r, &rm, seed, 0.7, 5).unwrap();
            assert!(validate_p(&am.p, r, &rm));
        }
    }
}

#[test]
fn lambda_is_invariant() {
    for lam in [vec![0.0], vec![0.7], vec![1.0, 0.5]] {
        let rmat = from_real_diag(&lam);
        let n = lam.len() + 1;
        let m = Hypersurface::model(n - 1, &rmat, 6);
        let base = invariants_signature(&m).unwrap();
        for seed in 0..5 {
            let am = random_allowed_map(n - 1, &rmat, seed, 0.5, 6).unwrap();
            let moved = invariants_signature(&apply_map(&m, &am.map).unwrap()).unwrap();
            assert!(moved.matches(&base, 1e-7), "{base:?} {moved:?}");
        }
    }
}

#[test]
fn fifty_random_triples() {
    let mut worst: f64 = 0.0;
    for seed in 0..50u64 {
        let lam = [0.0, 0.5, 1.0, 2.0, 0.25][seed as usize % 5];
        let rmat = from_real_diag(&[lam]);
        let m = disturbed(&rmat, 8, 100 + seed);
        let am = random_allowed_map(1, &rmat, seed, 0.4, 8).unwrap();
        let m2 = apply_map(&m, &am.map).unwrap();
        let rep = equivalent_to_degree(&m, &m2, &NormalizationP::identity(2), &am.p, 8).unwrap();
        assert!(rep.normal_forms_match, "seed {seed}: {:?}", rep.max_deviation);
        worst = worst.max(rep.max_deviation.unwrap());
    }
    assert!(worst < 1e-6);
}

#[test]
fn search_is_monotone_and_labeled() {
    // B is A moved by a linear sign flip
    let rmat = from_real_diag(&[0.5]);
    let m = disturbed(&rmat, 6, 12);
    let flip = NormalizationP::linear(1.0, from_real_diag(&[-1.0]), DVector::zeros(1));
    let m2 = apply_map(&m, &flip.to_map(1, 6).inverse().unwrap()).unwrap();
    let id = NormalizationP::identity(2);
    let plain = equivalent_to_degree(&m, &m2, &id, &id, 6).unwrap();
    let found = search_normalizations(&m, &m2, &id, 6, 64, 3, 1e-6).unwrap();
    assert!(found.max_deviation.unwrap() <= plain.max_deviation.unwrap());
    assert!(found.note.contains("heuristic"));
}
