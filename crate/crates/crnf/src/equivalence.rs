//! Equivalence testing through normal forms at fixed normalizations, and
//! random allowed coordinate changes for invariance checks.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coeff::holo_monomials;
use crate::error::{Error, Result};
use crate::full_nf::{model_data, normal_form, random_g0, NormalizationP};
use crate::hypersurface::Hypersurface;
use crate::linalg::CMatrix;
use crate::map::FormalMap;
use crate::partial_nf::{matrix_to_json, partial_nf, MatrixJson};
use crate::series::{c64, Series, Space, C64};

/// `(r, s, case, lambda or R)`.
#[derive(Clone, Debug)]
pub struct Signature {
    pub r: usize,
    pub s: usize,
    pub case: String,
    pub lambda: Option<Vec<f64>>,
    pub rmat: Option<CMatrix>,
}

impl Signature {
    /// Same integers and case; `lambda` equal within `tol`.
    pub fn matches(&self, other: &Signature, tol: f64) -> bool {
        let lam = match (&self.lambda, &other.lambda) {
            (Some(a), Some(b)) => a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol),
            (None, None) => true,
            _ => false,
        };
        self.r == other.r && self.s == other.s && self.case == other.case && lam
    }
}

pub fn invariants_signature(m: &Hypersurface) -> Result<Signature> {
    let p = partial_nf(m)?;
    Ok(Signature { r: p.r, s: p.s, case: p.case.tag().into(), lambda: p.lambda, rmat: p.rmat })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SignatureJson {
    pub r: usize,
    pub s: usize,
    pub case: String,
    pub lambda: Option<Vec<f64>>,
    #[serde(rename = "R")]
    pub rmat: Option<MatrixJson>,
}

impl Signature {
    pub fn to_json(&self) -> SignatureJson {
        SignatureJson {
            r: self.r,
            s: self.s,
            case: self.case.clone(),
            lambda: self.lambda.clone(),
            rmat: self.rmat.as_ref().map(matrix_to_json),
        }
    }
}

/// Comparison of two hypersurfaces at fixed normalizations. Unequal normal
/// forms only show that these normalizations do not match; they do not
/// prove inequivalence.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub invariants_match: bool,
    pub signature_a: SignatureJson,
    pub signature_b: SignatureJson,
    pub normal_forms_match: bool,
    /// Largest coefficient difference of the normal forms; `None` when the
    /// comparison was skipped.
    pub max_deviation: Option<f64>,
    pub degree: u32,
    pub normalizations: [crate::full_nf::NormalizationPJson; 2],
    pub note: String,
}

/// Compares normal forms through weighted degree `degree`. Both inputs must
/// be in the form `<z', zb'> + 2 Re(zb^n p_R(z)) + O(4)`.
pub fn equivalent_to_degree(
    m: &Hypersurface,
    m2: &Hypersurface,
    p: &NormalizationP,
    p2: &NormalizationP,
    degree: u32,
) -> Result<EquivalenceReport> {
    equivalent_with_tol(m, m2, p, p2, degree, 1e-6)
}

pub fn equivalent_with_tol(
    m: &Hypersurface,
    m2: &Hypersurface,
    p: &NormalizationP,
    p2: &NormalizationP,
    degree: u32,
    tol: f64,
) -> Result<EquivalenceReport> {
    let sa = invariants_signature(m)?;
    let sb = invariants_signature(m2)?;
    let mut invariants_match = sa.matches(&sb, 1e-7);
    if invariants_match {
        // the normal forms are only comparable for equal (r, R)
        let (ra, rma) = model_data(m)?;
        let (rb, rmb) = model_data(m2)?;
        invariants_match = ra == rb && (rma - rmb).norm() <= 1e-9;
    }
    let note = "normal forms compared at the given normalizations; a mismatch does not prove inequivalence".to_string();
    let normalizations = [p.to_json(), p2.to_json()];
    if !invariants_match {
        return Ok(EquivalenceReport {
            invariants_match,
            signature_a: sa.to_json(),
            signature_b: sb.to_json(),
            normal_forms_match: false,
            max_deviation: None,
            degree,
            normalizations,
            note: "invariants differ; comparison skipped".into(),
        });
    }
    let a = normal_form(m, p, degree)?;
    let b = normal_form(m2, p2, degree)?;
    let dev = a.normal.dist(&b.normal);
    Ok(EquivalenceReport {
        invariants_match,
        signature_a: sa.to_json(),
        signature_b: sb.to_json(),
        normal_forms_match: dev <= tol,
        max_deviation: Some(dev),
        degree,
        normalizations,
        note,
    })
}

/// A random change of coordinates `map = (T o P)^{-1}` with `T` in `G0`.
/// Normalizing `apply_map(M, map)` with `p` gives the same normal form as
/// normalizing `M` with the identity.
#[derive(Clone, Debug)]
pub struct AllowedMap {
    pub map: FormalMap,
    pub p: NormalizationP,
    pub t: FormalMap,
}

fn rc(rng: &mut ChaCha8Rng) -> C64 {
    c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// `(c, A)` from the stabilizer of `(I_{r,s}, R)`.
fn random_linear(r: usize, rmat: &CMatrix, scale: f64, rng: &mut ChaCha8Rng) -> (f64, CMatrix) {
    let m = rmat.nrows();
    let eps = |j: usize| if j < r { 1.0 } else { -1.0 };
    if scale == 0.0 {
        return (1.0, CMatrix::identity(m, m));
    }
    // groups of indices on which the stabilizer acts by a block
    let diag = (0..m).all(|i| (0..m).all(|j| i == j || rmat[(i, j)].norm() < 1e-12))
        && (0..m).all(|i| rmat[(i, i)].im.abs() < 1e-12);
    if !diag {
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        return (1.0, CMatrix::identity(m, m).scale(sign));
    }
    let zero = rmat.norm() < 1e-12;
    let c = if zero { (scale * rng.gen_range(-1.0..1.0)).exp() } else { 1.0 };
    let mut gen = CMatrix::zeros(m, m);
    let mut signs = CMatrix::identity(m, m);
    for i in 0..m {
        if rmat[(i, i)].norm() > 1e-12 && rng.gen_bool(0.5) {
            signs[(i, i)] = c64(-1.0, 0.0);
        }
        for j in 0..m {
            let same = eps(i) == eps(j) && (rmat[(i, i)].re - rmat[(j, j)].re).abs() < 1e-12;
            if !same || j < i {
                continue;
            }
            if rmat[(i, i)].norm() < 1e-12 {
                // unitary block: i * hermitian
                let x = if i == j { c64(rng.gen_range(-1.0..1.0), 0.0) } else { rc(rng) };
                gen[(i, j)] = c64(0.0, 1.0) * x;
                gen[(j, i)] = c64(0.0, 1.0) * x.conj();
            } else if i != j {
                // real orthogonal block: real skew
                let x = rng.gen_range(-1.0..1.0);
                gen[(i, j)] = c64(x, 0.0);
                gen[(j, i)] = c64(-x, 0.0);
            }
        }
    }
    let u = (gen.scale(scale)).exp() * signs;
    (c, u.scale(c.sqrt()))
}

/// Random normalization parameters valid for `(r, R)`.
pub fn random_normalization(r: usize, rmat: &CMatrix, scale: f64, rng: &mut ChaCha8Rng) -> NormalizationP {
    let m = rmat.nrows();
    let n = m + 1;
    let (c, a) = random_linear(r, rmat, scale, rng);
    let mut p = NormalizationP::linear(c, a, DVector::zeros(m));
    if scale == 0.0 {
        return p;
    }
    let hs = Space::Holo(n);
    p.b = DVector::from_fn(m, |_, _| rc(rng) * scale);
    for be in 0..m {
        let terms: Vec<_> = holo_monomials(n, 3, 0).into_iter().map(|mo| (mo, rc(rng) * scale)).collect();
        p.cubic[be] = Series::from_terms(hs, 3, terms);
        p.cw[be] = scale * rng.gen_range(-1.0..1.0);
        for al in 0..be {
            p.bw[(be, al)] = rc(rng) * scale;
        }
    }
    let terms: Vec<_> = holo_monomials(n, 2, 0).into_iter().map(|mo| (mo, rc(rng) * scale)).collect();
    p.quad_n = Series::from_terms(hs, 2, terms);
    p
}

/// Deterministic in `seed`; `scale = 0` gives the identity.
pub fn random_allowed_map(r: usize, rmat: &CMatrix, seed: u64, scale: f64, trunc: i32) -> Result<AllowedMap> {
    if !(scale.is_finite() && scale >= 0.0) {
        return Err(Error::Input(format!("scale must be finite and non-negative, got {scale}")));
    }
    let n = rmat.nrows() + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = random_normalization(r, rmat, scale, &mut rng);
    let t = random_g0(n, trunc.max(4) as u32, trunc, scale, &mut rng);
    let map = t.compose(&p.to_map(r, trunc))?.inverse()?;
    Ok(AllowedMap { map, p, t })
}

/// Heuristic search: keeps `p` for `m` and tries `iters` random
/// normalizations for `m2`, returning the report with the smallest
/// deviation. Only a match found this way means something; failure to find
/// one proves nothing.
pub fn search_normalizations(
    m: &Hypersurface,
    m2: &Hypersurface,
    p: &NormalizationP,
    degree: u32,
    iters: usize,
    seed: u64,
    tol: f64,
) -> Result<EquivalenceReport> {
    let (r, rmat) = model_data(m2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = equivalent_with_tol(m, m2, p, &NormalizationP::identity(m2.n()), degree, tol)?;
    for _ in 0..iters {
        if best.normal_forms_match || !best.invariants_match {
            break;
        }
        let scale = rng.gen_range(0.0..1.0);
        let cand = random_normalization(r, &rmat, scale, &mut rng);
        let rep = equivalent_with_tol(m, m2, p, &cand, degree, tol)?;
        if rep.max_deviation < best.max_deviation {
            best = rep;
        }
    }
    best.note = format!("heuristic search over {iters} random normalizations; {}", best.note);
    Ok(best)
}
