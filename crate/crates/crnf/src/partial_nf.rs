//! Third-order normalization of a hypersurface: regular coordinates, the
//! form `im w = <z, zb>_eps + 2 Re(h zb zb z) + O(4)`, the trichotomy for a
//! semidefinite Levi form of rank `n - 1`, and the generic partial normal
//! form `im w = <z', zb'> + 2 Re(zb^n p_R(z)) + O(4)`.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypersurface::Hypersurface;
use crate::linalg::{fro, gram_schmidt_pick, hermitian_eig, is_symmetric, takagi, CMatrix, EPS};
use crate::map::{apply_map, FormalMap, FormalMapJson};
use crate::series::{c64, Mono, Series, Space, C64};

/// Coefficient threshold below which a normalizing step is skipped.
const SKIP: f64 = 1e-13;

fn mixed_exps(n: usize, z: &[usize], zb: &[usize]) -> Vec<u32> {
    let mut e = vec![0u32; 2 * n + 1];
    for &i in z {
        e[i] += 1;
    }
    for &i in zb {
        e[n + i] += 1;
    }
    e
}

/// Levi matrix `G` with `phi_11 = sum G[a][b] zb^a z^b`.
pub fn levi_matrix(m: &Hypersurface) -> CMatrix {
    let n = m.n();
    CMatrix::from_fn(n, n, |a, b| m.phi().coeff_of(&mixed_exps(n, &[b], &[a])))
}

/// The cubic coefficients `k[g][(a, b)]`, symmetric in `a, b`, with
/// `phi_12 = sum k_{a b g} zb^a zb^b z^g`.
pub fn cubic_coefficients(m: &Hypersurface) -> Vec<CMatrix> {
    let n = m.n();
    (0..n)
        .map(|g| {
            CMatrix::from_fn(n, n, |a, b| {
                let c = m.phi().coeff_of(&mixed_exps(n, &[g], &[a, b]));
                if a == b {
                    c
                } else {
                    c * 0.5
                }
            })
        })
        .collect()
}

fn holo_of_pure(p: &Series, n: usize) -> Series {
    // z^a s^m -> z^a w^m; p has no zb.
    let mut map: Vec<Option<usize>> = (0..n).map(Some).collect();
    map.extend((0..n).map(|_| None));
    map.push(Some(n));
    p.relabel(Space::Holo(n), &map)
}

/// Removes the pure terms `phi(z, 0, s)` and `phi(0, zb, s)` degree by
/// degree with `w -> w - 2i A(z, w)`, where `A` collects the holomorphic
/// pure terms (and half of the terms in `s` alone).
pub fn to_regular(m: &Hypersurface) -> Result<(Hypersurface, FormalMap)> {
    let n = m.n();
    let trunc = m.trunc();
    let mut cur = m.clone();
    let mut total = FormalMap::identity(n, trunc);
    for nu in 2..=trunc.max(1) as u32 {
        let pure = cur.phi().homogeneous(nu).pure_part();
        if pure.max_abs() < SKIP {
            continue;
        }
        let hol = pure.filter(|t| {
            let (k, _) = pure.type_of(t.mono);
            k > 0
        });
        let only_s = pure.filter(|t| pure.type_of(t.mono) == (0, 0));
        let a = holo_of_pure(&(&hol + &only_s.scale_re(0.5)), n);
        let mut step = FormalMap::identity(n, trunc);
        step.g = &step.g + &a.scale(c64(0.0, -2.0));
        cur = apply_map(&cur, &step)?;
        total = step.compose(&total)?;
    }
    Ok((cur, total))
}

/// True iff `phi` has no pure terms above `tol`.
pub fn is_regular(m: &Hypersurface, tol: f64) -> bool {
    m.phi().pure_part().max_abs() <= tol
}

/// A hypersurface in third-order form and the data read off from it.
#[derive(Clone, Debug)]
pub struct ThirdOrder {
    pub m: Hypersurface,
    /// Map taking the input hypersurface to `m`.
    pub map: FormalMap,
    pub r: usize,
    pub s: usize,
    /// Levi matrix, `diag(eps)`.
    pub g: CMatrix,
    /// `h[j]` is the matrix `h_{a b gamma}` for `gamma = r + s + j`.
    pub h: Vec<CMatrix>,
}

impl ThirdOrder {
    pub fn rank(&self) -> usize {
        self.r + self.s
    }

    pub fn eps(&self) -> Vec<f64> {
        eps_vector(self.m.n(), self.r, self.s)
    }

    /// The `n x n` matrix `H = (h_{a b n})` (last kernel direction).
    pub fn h_matrix(&self) -> Option<&CMatrix> {
        self.h.last()
    }
}

fn eps_vector(n: usize, r: usize, s: usize) -> Vec<f64> {
    (0..n).map(|j| if j < r { 1.0 } else if j < r + s { -1.0 } else { 0.0 }).collect()
}

fn levi_tol(g: &CMatrix) -> f64 {
    EPS * (1.0 + fro(g))
}

/// Regular coordinates, diagonal Levi form `diag(eps)` with `r >= s`, and all
/// cubic coefficients `k_{a b mu}`, `mu <= r + s`, removed.
pub fn third_order_form(m: &Hypersurface) -> Result<ThirdOrder> {
    let n = m.n();
    let trunc = m.trunc();
    let (mut cur, mut total) = to_regular(m)?;
    let g = levi_matrix(&cur);
    let (mut vals, _) = hermitian_eig(&g)?;
    let tol = levi_tol(&g);
    let count = |v: &[f64]| (v.iter().filter(|&&x| x > tol).count(), v.iter().filter(|&&x| x < -tol).count());
    let (p, q) = count(&vals);
    if q > p {
        let flip = FormalMap::linear(&CMatrix::identity(n, n), &DVector::zeros(n), c64(-1.0, 0.0), trunc);
        cur = apply_map(&cur, &flip)?;
        total = flip.compose(&total)?;
        vals = hermitian_eig(&levi_matrix(&cur))?.0;
    }
    let (r, s) = count(&vals);
    let eps = eps_vector(n, r, s);
    let g = levi_matrix(&cur);
    let target = CMatrix::from_fn(n, n, |a, b| if a == b { c64(eps[a], 0.0) } else { C64::default() });
    if fro(&(&g - &target)) > tol {
        let (vals, u) = hermitian_eig(&g)?;
        // order: positive (largest first), negative (most negative first), zero
        let mut order: Vec<usize> = (0..n).filter(|&k| vals[k] > tol).collect();
        order.extend((0..n).rev().filter(|&k| vals[k] < -tol));
        order.extend((0..n).filter(|&k| vals[k].abs() <= tol));
        let mut c = CMatrix::zeros(n, n);
        for (col, &k) in order.iter().enumerate() {
            let scale = if vals[k].abs() > tol { 1.0 / vals[k].abs().sqrt() } else { 1.0 };
            c.set_column(col, &u.column(k).scale(scale));
        }
        let cinv = c.try_inverse().ok_or_else(|| Error::Singular("Levi diagonalization".into()))?;
        let lin = FormalMap::linear(&cinv, &DVector::zeros(n), c64(1.0, 0.0), trunc);
        cur = apply_map(&cur, &lin)?;
        total = lin.compose(&total)?;
    }
    let (cur, total) = remove_cubic_k(cur, total, &eps)?;
    let k = cubic_coefficients(&cur);
    let h = k[r + s..].to_vec();
    Ok(ThirdOrder { g: levi_matrix(&cur), m: cur, map: total, r, s, h })
}

/// `z^mu -> z^mu + eps_mu sum conj(k_{a b mu}) z^a z^b` for the nondegenerate
/// directions `mu`.
fn remove_cubic_k(cur: Hypersurface, total: FormalMap, eps: &[f64]) -> Result<(Hypersurface, FormalMap)> {
    let n = cur.n();
    let trunc = cur.trunc();
    let k = cubic_coefficients(&cur);
    let rank = eps.iter().filter(|e| **e != 0.0).count();
    if k[..rank].iter().all(|km| km.iter().all(|c| c.norm() < SKIP)) {
        return Ok((cur, total));
    }
    let sp = Space::Holo(n);
    let mut step = FormalMap::identity(n, trunc);
    for mu in 0..rank {
        let terms = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| {
            (Mono::var(a).times(Mono::var(b)), k[mu][(a, b)].conj() * eps[mu])
        });
        step.f[mu] = &step.f[mu] + &Series::from_terms(sp, trunc, terms);
    }
    let out = apply_map(&cur, &step)?;
    Ok((out, step.compose(&total)?))
}

/// Shape predicates of the third-order form, checked to `tol`: regular,
/// Levi matrix `diag(eps)`, no cubic terms `k_{a b mu}` with `mu <= r + s`.
pub fn is_third_order_form(m: &Hypersurface, r: usize, s: usize, tol: f64) -> bool {
    let n = m.n();
    let eps = eps_vector(n, r, s);
    let g = levi_matrix(m);
    let target = CMatrix::from_fn(n, n, |a, b| if a == b { c64(eps[a], 0.0) } else { C64::default() });
    let k = cubic_coefficients(m);
    is_regular(m, tol)
        && fro(&(&g - &target)) <= tol
        && k[..r + s].iter().all(|km| km.iter().all(|c| c.norm() <= tol))
}

/// The three cases for a semidefinite Levi form of rank `n - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SemidefKind {
    I,
    II,
    III,
}

/// Classification of `H = (h_{a b n})` under the frame changes that keep the
/// Levi form `diag(1, ..., 1, 0)`. The change is `B = [[V, c], [0, d]]` with
/// `a V V^* = I`; `h_out = a conj(d) B H B^T` is the block form of the case.
#[derive(Clone, Debug)]
pub struct SemidefClass {
    pub kind: SemidefKind,
    pub lambda: Vec<f64>,
    pub b: CMatrix,
    pub a: f64,
    pub h_out: CMatrix,
}

impl SemidefClass {
    pub fn d(&self) -> C64 {
        let n = self.b.nrows();
        self.b[(n - 1, n - 1)]
    }
}

/// `a conj(d) B H B^T`.
pub fn transform_h(h: &CMatrix, b: &CMatrix, a: f64) -> CMatrix {
    let n = b.nrows();
    (b * h * b.transpose()).scale(a) * b[(n - 1, n - 1)].conj()
}

/// The block matrix of each case for a given `lambda` (`n - 1` entries).
pub fn target_form(kind: SemidefKind, lambda: &[f64]) -> CMatrix {
    let n = lambda.len() + 1;
    let mut h = CMatrix::zeros(n, n);
    for (k, &l) in lambda.iter().enumerate() {
        h[(k, k)] = c64(l, 0.0);
    }
    match kind {
        SemidefKind::I => {
            h[(n - 2, n - 1)] = c64(1.0, 0.0);
            h[(n - 1, n - 2)] = c64(1.0, 0.0);
        }
        SemidefKind::II => {}
        SemidefKind::III => h[(n - 1, n - 1)] = c64(1.0, 0.0),
    }
    h
}

fn block(v: &CMatrix, c: &DVector<C64>, d: C64) -> CMatrix {
    let m = v.nrows();
    let mut b = CMatrix::zeros(m + 1, m + 1);
    b.view_mut((0, 0), (m, m)).copy_from(v);
    b.view_mut((0, m), (m, 1)).copy_from(c);
    b[(m, m)] = d;
    b
}

/// Takagi values normalized to `lambda_1 = 1` (or all zero), the unitary
/// `U` with `U E U^T = sigma_1 D(lambda)`, and `sigma_1`.
fn normalized_takagi(e: &CMatrix, tol: f64) -> Result<(Vec<f64>, CMatrix, f64)> {
    let t = takagi(e)?;
    let top = t.lambda.first().copied().unwrap_or(0.0);
    if top <= tol {
        return Ok((vec![0.0; e.nrows()], CMatrix::identity(e.nrows(), e.nrows()), 0.0));
    }
    let lambda = t.lambda.iter().map(|&x| if x <= tol { 0.0 } else { x / top }).collect();
    Ok((lambda, t.u, top))
}

/// Puts `H` in precisely one of the forms (i), (ii), (iii).
pub fn classify_semidefinite(h: &CMatrix) -> Result<SemidefClass> {
    let n = h.nrows();
    if n < 2 || h.ncols() != n {
        return Err(Error::Input("H must be square of size at least 2".into()));
    }
    if !is_symmetric(h, EPS * (1.0 + fro(h))) {
        return Err(Error::Input("H must be symmetric".into()));
    }
    let m = n - 1;
    let tol = EPS * (1.0 + fro(h));
    let amat = h.view((0, 0), (m, m)).into_owned();
    let beta: DVector<C64> = h.view((0, m), (m, 1)).column(0).into_owned();
    let gamma = h[(m, m)];
    let one = c64(1.0, 0.0);
    let (kind, lambda, b, a) = if gamma.norm() > tol {
        let e = &amat - (&beta * beta.transpose()) / gamma;
        let phase = C64::from_polar(1.0, -gamma.arg());
        let d1 = phase * gamma.norm().powf(-1.0 / 3.0);
        let (lambda, u, top) = normalized_takagi(&(e * d1.conj()), tol)?;
        let a = if top > 0.0 { top.powi(3) } else { 1.0 };
        let v = u.unscale(a.sqrt());
        let c = -(&v * &beta) / gamma;
        let d = phase * (gamma.norm() * a).powf(-1.0 / 3.0);
        (SemidefKind::III, lambda, block(&v, &c, d), a)
    } else if beta.norm() <= tol {
        let (lambda, u, top) = normalized_takagi(&amat, tol)?;
        let d = if top > 0.0 { one / top } else { one };
        (SemidefKind::II, lambda, block(&u, &DVector::zeros(m), d), 1.0)
    } else {
        // rotate beta to |beta| e_{n-1}
        let bn = beta.norm();
        let u0 = beta.unscale(bn);
        let std: Vec<DVector<C64>> = (0..m).map(|i| DVector::from_fn(m, |j, _| if i == j { one } else { c64(0.0, 0.0) })).collect();
        let rest = gram_schmidt_pick(&[u0.clone()], &std, m - 1);
        let mut v1 = CMatrix::zeros(m, m);
        for (i, r) in rest.iter().enumerate() {
            v1.set_row(i, &r.adjoint());
        }
        v1.set_row(m - 1, &u0.adjoint());
        let ap = &v1 * &amat * v1.transpose();
        let l = m - 1;
        let mut p = DVector::<C64>::zeros(m);
        for i in 0..l {
            p[i] = -ap[(i, l)] / bn;
        }
        p[l] = -ap[(l, l)] / (2.0 * bn);
        let e = ap.view((0, 0), (l, l)).into_owned();
        let (lam, f, top) = normalized_takagi(&e, tol)?;
        let d = if top > 0.0 { one / top } else { one };
        let a = 1.0 / (d.norm().powi(4) * bn * bn);
        let mut vt = CMatrix::identity(m, m);
        vt.view_mut((0, 0), (l, l)).copy_from(&f);
        let v2 = vt.unscale(a.sqrt());
        let c = &v2 * &p;
        let mut lambda = lam;
        lambda.push(0.0);
        (SemidefKind::I, lambda, block(&(&v2 * &v1), &c, d), a)
    };
    let h_out = transform_h(h, &b, a);
    Ok(SemidefClass { kind, lambda, b, a, h_out })
}

/// The coordinate change realizing a frame change `(B, a)` on a hypersurface
/// in third-order form: `z -> (B^*)^{-1} z`, `w -> a w`, followed by the
/// removal of the cubic terms it creates in the nondegenerate directions.
pub fn realize_frame_change(t: &ThirdOrder, b: &CMatrix, a: f64) -> Result<ThirdOrder> {
    let n = t.m.n();
    let trunc = t.m.trunc();
    let binv = b.adjoint().try_inverse().ok_or_else(|| Error::Singular("frame change".into()))?;
    let lin = FormalMap::linear(&binv, &DVector::zeros(n), c64(a, 0.0), trunc);
    let cur = apply_map(&t.m, &lin)?;
    let total = lin.compose(&t.map)?;
    let (cur, total) = remove_cubic_k(cur, total, &t.eps())?;
    let k = cubic_coefficients(&cur);
    Ok(ThirdOrder { g: levi_matrix(&cur), h: k[t.r + t.s..].to_vec(), m: cur, map: total, r: t.r, s: t.s })
}

/// True iff the Levi degeneracy is generic (`h_{n n n} != 0` in third-order
/// form). Fails unless the Levi form has rank `n - 1`.
pub fn detect_generic(m: &Hypersurface) -> Result<bool> {
    let t = third_order_form(m)?;
    rank_check(&t)?;
    let h = t.h_matrix().expect("rank n-1 leaves one kernel direction");
    let n = m.n();
    Ok(h[(n - 1, n - 1)].norm() > EPS * (1.0 + fro(h)))
}

fn rank_check(t: &ThirdOrder) -> Result<()> {
    let n = t.m.n();
    if t.rank() + 1 != n {
        return Err(Error::NotApplicable(format!("Levi form has rank {}, expected {}", t.rank(), n - 1)));
    }
    Ok(())
}

/// Case tag of a partial normal form.
#[derive(Clone, Debug, PartialEq)]
pub enum PartialCase {
    /// Generic Levi degeneracy with an indefinite Levi form; `R` is a
    /// representative of its class.
    Generic,
    Semidef(SemidefKind),
    Other,
}

impl PartialCase {
    pub fn tag(&self) -> &'static str {
        match self {
            PartialCase::Generic => "generic",
            PartialCase::Semidef(SemidefKind::I) => "semidef_i",
            PartialCase::Semidef(SemidefKind::II) => "semidef_ii",
            PartialCase::Semidef(SemidefKind::III) => "semidef_iii",
            PartialCase::Other => "other",
        }
    }
}

/// Output of [`partial_nf`] and [`generic_partial_nf`].
#[derive(Clone, Debug)]
pub struct PartialNFResult {
    pub r: usize,
    pub s: usize,
    pub case: PartialCase,
    pub lambda: Option<Vec<f64>>,
    /// The matrix `R` of `p_R(z) = z'^T R z' + (z^n)^2` in the output.
    pub rmat: Option<CMatrix>,
    pub aut_dim_bound: Option<u64>,
    pub map: FormalMap,
    pub m_out: Hypersurface,
}

/// A complex matrix in JSON: rows of `[re, im]` pairs.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(a: &CMatrix) -> MatrixJson {
    (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| [a[(i, j)].re + 0.0, a[(i, j)].im + 0.0]).collect()).collect()
}

pub fn matrix_from_json(j: &MatrixJson) -> Result<CMatrix> {
    let rows = j.len();
    let cols = j.first().map_or(0, |r| r.len());
    if j.iter().any(|r| r.len() != cols) {
        return Err(Error::Input("ragged matrix".into()));
    }
    Ok(CMatrix::from_fn(rows, cols, |a, b| c64(j[a][b][0], j[a][b][1])))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartialNFJson {
    pub r: usize,
    pub s: usize,
    pub case: String,
    pub lambda: Option<Vec<f64>>,
    #[serde(rename = "R")]
    pub rmat: Option<MatrixJson>,
    pub aut_dim_bound: Option<u64>,
    pub map: FormalMapJson,
}

impl PartialNFResult {
    pub fn to_json(&self) -> PartialNFJson {
        PartialNFJson {
            r: self.r,
            s: self.s,
            case: self.case.tag().into(),
            lambda: self.lambda.clone(),
            rmat: self.rmat.as_ref().map(matrix_to_json),
            aut_dim_bound: self.aut_dim_bound,
            map: self.map.to_json(),
        }
    }
}

/// `R` read from the output: the cubic term `2 Re(zb^n z'^T R z')` has
/// `h_{a b n} = conj(R_{a b})`.
fn r_from(t: &ThirdOrder) -> CMatrix {
    let n = t.m.n();
    let h = t.h_matrix().unwrap();
    h.view((0, 0), (n - 1, n - 1)).map(|c| c.conj())
}

/// Partial normal form at a generic Levi degeneracy: Levi block `I_{r,s}`,
/// `H = [[conj R, 0], [0, 1]]`. For a semidefinite Levi form `R` is brought
/// to `D(lambda)`; otherwise a representative `R` of its class is returned.
pub fn generic_partial_nf(m: &Hypersurface) -> Result<PartialNFResult> {
    let t = third_order_form(m)?;
    rank_check(&t)?;
    let n = m.n();
    let h = t.h_matrix().unwrap().clone();
    let gamma = h[(n - 1, n - 1)];
    if gamma.norm() <= EPS * (1.0 + fro(&h)) {
        return Err(Error::NotApplicable("the Levi degeneracy is not generic (h_nnn = 0)".into()));
    }
    if t.s == 0 {
        let cls = classify_semidefinite(&h)?;
        let out = realize_frame_change(&t, &cls.b, cls.a)?;
        let lambda = cls.lambda.clone();
        return Ok(PartialNFResult {
            r: out.r,
            s: 0,
            case: PartialCase::Semidef(SemidefKind::III),
            aut_dim_bound: Some(aut_dim_bound(n, &lambda)),
            rmat: Some(r_from(&out)),
            lambda: Some(lambda),
            map: out.map.clone(),
            m_out: out.m,
        });
    }
    let m1 = n - 1;
    let beta: DVector<C64> = h.view((0, m1), (m1, 1)).column(0).into_owned();
    let d = C64::from_polar(gamma.norm().powf(-1.0 / 3.0), -gamma.arg());
    let b = block(&CMatrix::identity(m1, m1), &(-beta / gamma), d);
    let out = realize_frame_change(&t, &b, 1.0)?;
    Ok(PartialNFResult {
        r: out.r,
        s: out.s,
        case: PartialCase::Generic,
        lambda: None,
        rmat: Some(r_from(&out)),
        aut_dim_bound: None,
        map: out.map.clone(),
        m_out: out.m,
    })
}

/// Third-order partial normal form for any input: the generic form when the
/// degeneracy is generic, the trichotomy when the Levi form is semidefinite
/// of rank `n - 1`, and the bare third-order form otherwise.
pub fn partial_nf(m: &Hypersurface) -> Result<PartialNFResult> {
    let t = third_order_form(m)?;
    let n = m.n();
    if t.rank() + 1 == n {
        let h = t.h_matrix().unwrap();
        if h[(n - 1, n - 1)].norm() > EPS * (1.0 + fro(h)) {
            return generic_partial_nf(m);
        }
        if t.s == 0 {
            let cls = classify_semidefinite(h)?;
            let out = realize_frame_change(&t, &cls.b, cls.a)?;
            return Ok(PartialNFResult {
                r: out.r,
                s: 0,
                case: PartialCase::Semidef(cls.kind),
                lambda: Some(cls.lambda),
                rmat: None,
                aut_dim_bound: None,
                map: out.map.clone(),
                m_out: out.m,
            });
        }
    }
    Ok(PartialNFResult {
        r: t.r,
        s: t.s,
        case: PartialCase::Other,
        lambda: None,
        rmat: None,
        aut_dim_bound: None,
        map: t.map,
        m_out: t.m,
    })
}

/// Upper bound for the real dimension of the stability group at a generic
/// semidefinite Levi degeneracy with invariant `lambda` (`n - 1` entries,
/// either zero or with `lambda_1 = 1`).
pub fn aut_dim_bound(n: usize, lambda: &[f64]) -> u64 {
    let n = n as u64;
    let base = (n - 1) * n * (n + 1) * (n + 2) / 3;
    let tol = 1e-9;
    if lambda.iter().all(|l| l.abs() <= tol) {
        return base + 3 * n * n - n + 1;
    }
    let mut vals: Vec<f64> = lambda.iter().copied().filter(|l| l.abs() > tol).collect();
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mu = (lambda.len() - vals.len()) as u64;
    let mut mult_sum = 0u64;
    let mut i = 0;
    while i < vals.len() {
        let mut j = i;
        while j < vals.len() && (vals[j] - vals[i]).abs() <= tol {
            j += 1;
        }
        let mj = (j - i) as u64;
        mult_sum += mj * (mj - 1) / 2;
        i = j;
    }
    base + 2 * n * n + n - 1 + mult_sum + mu * mu
}
