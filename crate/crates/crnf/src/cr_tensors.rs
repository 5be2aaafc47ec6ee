//! CR frames, the spaces `E_j` and `F_k`, finite nondegeneracy, the tensors
//! `psi_j` and the cubic form, all evaluated at the origin.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypersurface::Hypersurface;
use crate::linalg::{colspace, nullspace, rank, CMatrix, EPS};
use crate::series::{c64, Mono, Series, Space, C64};

/// Generic submanifold `rho_1 = ... = rho_d = 0` of `C^N`, `N = n + d`,
/// described by real series in `Space::Ambient`.
#[derive(Clone, Debug)]
pub struct GenericSubmanifold {
    n: usize,
    d: usize,
    rho: Vec<Series>,
}

impl GenericSubmanifold {
    pub fn new(rho: Vec<Series>) -> Result<GenericSubmanifold> {
        let (n, d) = match rho.first().map(|r| r.space()) {
            Some(Space::Ambient { n, d, .. }) => (n, d),
            Some(sp) => return Err(Error::SpaceMismatch(format!("defining functions must be ambient, got {sp:?}"))),
            None => return Err(Error::Input("no defining functions".into())),
        };
        if rho.len() != d || rho.iter().any(|r| r.space() != rho[0].space()) {
            return Err(Error::Input(format!("expected {d} defining functions in one space")));
        }
        for r in &rho {
            if !r.is_real(1e-9 * (1.0 + r.max_abs())) {
                return Err(Error::NonReal);
            }
            if r.constant_term().norm() > EPS {
                return Err(Error::Input("defining function does not vanish at 0".into()));
            }
        }
        let m = GenericSubmanifold { n, d, rho };
        let big = n + d;
        let grad = CMatrix::from_fn(d, 2 * big, |l, k| m.rho[l].coeff(Mono::var(k)));
        if rank(&grad, EPS) < d {
            return Err(Error::Input("defining functions are not independent at 0".into()));
        }
        let block = m.zbar2_block_at0();
        if rank(&block, EPS) < d {
            return Err(Error::Input("d rho / d Zbar'' is not invertible at 0".into()));
        }
        Ok(m)
    }

    /// `rho = -im w + phi(z, zb, re w)` with heavy weights on `w`.
    pub fn from_hypersurface(h: &Hypersurface) -> GenericSubmanifold {
        let n = h.n();
        let tr = h.trunc();
        let sp = Space::Ambient { n, d: 1, heavy: true };
        let big = n + 1;
        let (w, wb) = (Series::var(sp, tr, n), Series::var(sp, tr, big + n));
        let mut imgs: Vec<Series> = (0..n).map(|i| Series::var(sp, tr, i)).collect();
        imgs.extend((0..n).map(|i| Series::var(sp, tr, big + i)));
        imgs.push((&w + &wb).scale_re(0.5));
        let phi = h.phi().substitute(&imgs, sp).expect("graph substitution");
        let rho = &(&wb - &w).scale(c64(0.0, -0.5)) + &phi;
        GenericSubmanifold { n, d: 1, rho: vec![rho] }
    }

    /// Random admissible submanifold: `rho_l = -im w_l` plus random real
    /// terms of degree `2..=trunc` in all ambient variables.
    pub fn random<R: Rng>(n: usize, d: usize, trunc: i32, terms: usize, rng: &mut R) -> GenericSubmanifold {
        let sp = Space::Ambient { n, d, heavy: false };
        let big = n + d;
        let mut rho = Vec::with_capacity(d);
        for l in 0..d {
            let w = Series::var(sp, trunc, n + l);
            let wb = Series::var(sp, trunc, big + n + l);
            let mut r = (&wb - &w).scale(c64(0.0, -0.5));
            for _ in 0..terms {
                let deg = rng.gen_range(2..=trunc.max(2)) as u32;
                let mut e = vec![0u32; 2 * big];
                for _ in 0..deg {
                    e[rng.gen_range(0..2 * big)] += 1;
                }
                let c = c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let t = Series::monomial(sp, trunc, &e, c);
                r = &r + &(&t + &t.conj());
            }
            rho.push(r);
        }
        GenericSubmanifold::new(rho).expect("random submanifold is admissible")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Ambient dimension `N = n + d`.
    pub fn big_n(&self) -> usize {
        self.n + self.d
    }

    pub fn trunc(&self) -> i32 {
        self.rho.iter().map(|r| r.trunc()).min().unwrap()
    }

    pub fn rho(&self) -> &[Series] {
        &self.rho
    }

    pub fn space(&self) -> Space {
        self.rho[0].space()
    }

    fn zbar2_block_at0(&self) -> CMatrix {
        let big = self.big_n();
        CMatrix::from_fn(self.d, self.d, |l, k| self.rho[l].coeff(Mono::var(big + self.n + k)))
    }

    /// `d rho_l / d Z^m` for `m < N`.
    pub fn holo_gradient(&self, l: usize) -> Vec<Series> {
        (0..self.big_n()).map(|m| self.rho[l].deriv(m)).collect()
    }
}

/// Vector field with series coefficients over `d/dZ^1..d/dZ^N,
/// d/dZb^1..d/dZb^N`.
#[derive(Clone, Debug)]
pub struct VectorField {
    pub coeffs: Vec<Series>,
}

impl VectorField {
    pub fn apply(&self, f: &Series) -> Series {
        let mut acc: Option<Series> = None;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_empty() {
                continue;
            }
            let part = c.mul_val(&f.deriv(k));
            acc = Some(match acc {
                None => part,
                Some(a) => &a + &part,
            });
        }
        acc.unwrap_or_else(|| Series::zero(f.space(), f.trunc()))
    }

    pub fn bracket(&self, other: &VectorField) -> VectorField {
        let coeffs = (0..self.coeffs.len()).map(|k| &self.apply(&other.coeffs[k]) - &other.apply(&self.coeffs[k])).collect();
        VectorField { coeffs }
    }

    /// Complex conjugate field.
    pub fn conj(&self) -> VectorField {
        let sp = self.coeffs[0].space();
        let mut coeffs = self.coeffs.clone();
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[sp.conj_var(k).unwrap()] = c.conj();
        }
        VectorField { coeffs }
    }

    pub fn combine(fields: &[VectorField], weights: &[C64]) -> VectorField {
        let mut coeffs: Vec<Series> = fields[0].coeffs.iter().map(|c| c.scale(weights[0])).collect();
        for (f, &w) in fields.iter().zip(weights).skip(1) {
            for (a, b) in coeffs.iter_mut().zip(&f.coeffs) {
                *a = &*a + &b.scale(w);
            }
        }
        VectorField { coeffs }
    }

    pub fn at0(&self) -> DVector<C64> {
        DVector::from_iterator(self.coeffs.len(), self.coeffs.iter().map(|c| c.constant_term()))
    }
}

/// CR vector fields `L_kbar = d/dZb^k + sum_l a_kl d/dZb^{n+l}` and the
/// characteristic forms `theta^l = 2i d rho_l`.
#[derive(Clone, Debug)]
pub struct CRFrame {
    pub l: Vec<VectorField>,
    /// `theta[l][m]`: coefficient of `dZ^m`.
    pub theta: Vec<Vec<Series>>,
}

/// Inverse of a matrix of series with invertible constant part, by a
/// Neumann series.
fn series_matrix_inverse(m: &[Vec<Series>]) -> Result<Vec<Vec<Series>>> {
    let d = m.len();
    let sp = m[0][0].space();
    let tr = m.iter().flatten().map(|s| s.trunc()).min().unwrap();
    let m0 = CMatrix::from_fn(d, d, |i, j| m[i][j].constant_term());
    let m0i = m0.try_inverse().ok_or_else(|| Error::Singular("constant part of the frame block".into()))?;
    // X = M0^{-1} (M - M0), inverse = sum_k (-X)^k M0^{-1}
    let rest: Vec<Vec<Series>> = m.iter().map(|row| row.iter().map(|s| s.filter(|t| t.mono != Mono::ONE)).collect()).collect();
    let x: Vec<Vec<Series>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    (0..d).fold(Series::zero(sp, tr), |acc, k| &acc + &rest[k][j].scale(m0i[(i, k)]))
                })
                .collect()
        })
        .collect();
    let cst = |i: usize, j: usize| Series::constant(sp, tr, m0i[(i, j)]);
    let mut term: Vec<Vec<Series>> = (0..d).map(|i| (0..d).map(|j| cst(i, j)).collect()).collect();
    let mut acc = term.clone();
    for _ in 0..=tr.max(0) {
        term = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        (0..d).fold(Series::zero(sp, tr), |a, k| &a - &x[i][k].mul_val(&term[k][j]).truncated(tr))
                    })
                    .collect()
            })
            .collect();
        if term.iter().flatten().all(|s| s.is_empty()) {
            break;
        }
        for i in 0..d {
            for j in 0..d {
                acc[i][j] = &acc[i][j] + &term[i][j];
            }
        }
    }
    Ok(acc)
}

pub fn cr_frame(m: &GenericSubmanifold) -> Result<CRFrame> {
    let (n, d, big) = (m.n(), m.d(), m.big_n());
    let sp = m.space();
    let tr = m.trunc();
    let block: Vec<Vec<Series>> = (0..d).map(|l| (0..d).map(|k| m.rho[l].deriv(big + n + k)).collect()).collect();
    let inv = series_matrix_inverse(&block)?;
    let mut l_fields = Vec::with_capacity(n);
    for k in 0..n {
        let mut coeffs = vec![Series::zero(sp, tr); 2 * big];
        coeffs[big + k] = Series::one(sp, tr);
        let rz: Vec<Series> = (0..d).map(|l| m.rho[l].deriv(big + k)).collect();
        for j in 0..d {
            let mut a = Series::zero(sp, tr);
            for l in 0..d {
                a = &a - &inv[j][l].mul_val(&rz[l]);
            }
            coeffs[big + n + j] = a;
        }
        l_fields.push(VectorField { coeffs });
    }
    let theta = (0..d).map(|l| m.holo_gradient(l).iter().map(|s| s.scale(c64(0.0, 2.0))).collect()).collect();
    Ok(CRFrame { l: l_fields, theta })
}

fn value_at0(s: &Series) -> Result<C64> {
    if s.trunc() < 0 {
        return Err(Error::Truncation("raise trunc: too many derivatives for the available order".into()));
    }
    Ok(s.constant_term())
}

/// Words `L^Jbar (d rho_l / dZ)` with memoization; `J = (J1, ..., Jk)` means
/// `L_J1 (L_J2 ( ... ))`.
struct Words<'a> {
    fields: &'a [VectorField],
    base: Vec<Vec<Series>>,
    memo: HashMap<(Vec<usize>, usize), Vec<Series>>,
}

impl<'a> Words<'a> {
    fn new(fields: &'a [VectorField], base: Vec<Vec<Series>>) -> Self {
        Words { fields, base, memo: HashMap::new() }
    }

    fn get(&mut self, word: &[usize], l: usize) -> Vec<Series> {
        if word.is_empty() {
            return self.base[l].clone();
        }
        let key = (word.to_vec(), l);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let inner = self.get(&word[1..], l);
        let out: Vec<Series> = inner.iter().map(|s| self.fields[word[0]].apply(s)).collect();
        self.memo.insert(key, out.clone());
        out
    }

    fn covector(&mut self, word: &[usize], l: usize) -> Result<DVector<C64>> {
        let v = self.get(word, l);
        let vals = v.iter().map(value_at0).collect::<Result<Vec<_>>>()?;
        Ok(DVector::from_vec(vals))
    }
}

/// `L^Jbar (d rho_l / dZ^m)`, `m = 1..N`, as series.
pub fn apply_t(m: &GenericSubmanifold, word: &[usize], l: usize) -> Result<Vec<Series>> {
    if word.iter().any(|&k| k >= m.n()) || l >= m.d() {
        return Err(Error::Input("index out of range".into()));
    }
    let frame = cr_frame(m)?;
    let base = (0..m.d()).map(|l| m.holo_gradient(l)).collect();
    let out = Words::new(&frame.l, base).get(word, l);
    if out.iter().any(|s| s.trunc() < 0) {
        return Err(Error::Truncation(format!("word of length {} exceeds the truncation", word.len())));
    }
    Ok(out)
}

/// Subspace with an orthonormal basis (columns).
#[derive(Clone, Debug)]
pub struct Subspace {
    pub ambient: usize,
    pub basis: CMatrix,
    pub tol: f64,
}

impl Subspace {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn from_spanning(ambient: usize, vecs: &[DVector<C64>], tol: f64) -> Subspace {
        if vecs.is_empty() {
            return Subspace { ambient, basis: CMatrix::zeros(ambient, 0), tol };
        }
        let a = CMatrix::from_columns(vecs);
        Subspace { ambient, basis: colspace(&a, tol), tol }
    }

    /// Largest principal angle to another subspace of equal dimension
    /// (infinite if the dimensions differ).
    pub fn max_angle(&self, other: &Subspace) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        crate::linalg::principal_angles(&self.basis, &other.basis).into_iter().fold(0.0, f64::max)
    }
}

fn words_of_len(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..n).map(move |i| {
                    let mut v = vec![i];
                    v.extend_from_slice(&w);
                    v
                })
            })
            .collect();
    }
    out
}

fn e_spaces_from(words: &mut Words, n: usize, d: usize, big: usize, kmax: usize, stop_full: bool) -> Result<Vec<Subspace>> {
    let mut vecs = Vec::new();
    let mut out = Vec::new();
    for j in 0..=kmax {
        for w in words_of_len(n, j) {
            for l in 0..d {
                vecs.push(words.covector(&w, l)?);
            }
        }
        let sub = Subspace::from_spanning(big, &vecs, EPS);
        vecs = (0..sub.dim()).map(|i| sub.basis.column(i).into_owned()).collect();
        let full = sub.dim() == big;
        out.push(sub);
        if full && stop_full {
            break;
        }
    }
    Ok(out)
}

/// `E_0, ..., E_kmax` from the words `T^J theta^l`, as subspaces of
/// `T'_0 = C^N` (covector coordinates in `dZ`).
pub fn e_spaces(m: &GenericSubmanifold, kmax: usize) -> Result<Vec<Subspace>> {
    let frame = cr_frame(m)?;
    // T_L w = (1/2i) L(w_m) dZ^m applied to theta = 2i d rho
    let base = frame.theta.clone();
    let scaled: Vec<VectorField> = frame.l.iter().map(|f| VectorField { coeffs: f.coeffs.iter().map(|c| c.scale(c64(0.0, -0.5))).collect() }).collect();
    let mut w = Words::new(&scaled, base);
    e_spaces_from(&mut w, m.n(), m.d(), m.big_n(), kmax, false)
}

/// Change of CR basis `K_k = sum_m c[k][m] L_m` and of characteristic
/// basis `theta'^i = sum_j b[i][j] theta^j`, with series coefficients.
#[derive(Clone, Debug)]
pub struct FrameTwist {
    pub c: Vec<Vec<Series>>,
    pub b: Vec<Vec<Series>>,
}

impl FrameTwist {
    /// Random twist with invertible constant parts and nonconstant terms of
    /// degree 1 and 2.
    pub fn random<R: Rng>(m: &GenericSubmanifold, rng: &mut R) -> FrameTwist {
        let sp = m.space();
        let tr = m.trunc();
        let nv = sp.nvars();
        let rand_series = |diag: bool, rng: &mut R| {
            let mut s = Series::constant(sp, tr, c64(if diag { 2.0 } else { 0.0 } + rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)));
            for deg in 1..=2u32 {
                let mut e = vec![0u32; nv];
                for _ in 0..deg {
                    e[rng.gen_range(0..nv)] += 1;
                }
                s = &s + &Series::monomial(sp, tr, &e, c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            }
            s
        };
        let c = (0..m.n()).map(|i| (0..m.n()).map(|j| rand_series(i == j, rng)).collect()).collect();
        let b = (0..m.d()).map(|i| (0..m.d()).map(|j| rand_series(i == j, rng)).collect()).collect();
        FrameTwist { c, b }
    }
}

/// `E_j` from the 𝒯-words over a twisted CR basis and characteristic basis.
pub fn e_spaces_twisted(m: &GenericSubmanifold, kmax: usize, twist: &FrameTwist) -> Result<Vec<Subspace>> {
    let frame = cr_frame(m)?;
    let (n, d, big) = (m.n(), m.d(), m.big_n());
    let fields: Vec<VectorField> = (0..n)
        .map(|k| {
            let mut coeffs = vec![Series::zero(m.space(), m.trunc()); 2 * big];
            for (j, f) in frame.l.iter().enumerate() {
                for (a, b) in coeffs.iter_mut().zip(&f.coeffs) {
                    *a = &*a + &twist.c[k][j].mul_val(b);
                }
            }
            VectorField { coeffs: coeffs.iter().map(|c| c.scale(c64(0.0, -0.5))).collect() }
        })
        .collect();
    let base: Vec<Vec<Series>> = (0..d)
        .map(|i| {
            (0..big)
                .map(|mm| (0..d).fold(Series::zero(m.space(), m.trunc()), |a, j| &a + &twist.b[i][j].mul_val(&frame.theta[j][mm])))
                .collect()
        })
        .collect();
    let mut w = Words::new(&fields, base);
    e_spaces_from(&mut w, n, d, big, kmax, false)
}

/// `E_j` from the gradient form: spans of `L^Jbar (d rho_l/dZ)(0)`.
pub fn e_spaces_gradient(m: &GenericSubmanifold, kmax: usize) -> Result<Vec<Subspace>> {
    let frame = cr_frame(m)?;
    let base = (0..m.d()).map(|l| m.holo_gradient(l)).collect();
    let mut w = Words::new(&frame.l, base);
    e_spaces_from(&mut w, m.n(), m.d(), m.big_n(), kmax, false)
}

/// Smallest `k <= kmax` with `E_k = C^N`; `None` if there is none.
/// The result is cross-checked against the gradient form.
pub fn nondegeneracy(m: &GenericSubmanifold, kmax: usize) -> Result<Option<usize>> {
    let frame = cr_frame(m)?;
    let base = (0..m.d()).map(|l| m.holo_gradient(l)).collect();
    let mut w = Words::new(&frame.l, base);
    let es = e_spaces_from(&mut w, m.n(), m.d(), m.big_n(), kmax, true)?;
    let k = es.iter().position(|e| e.dim() == m.big_n());
    let other = e_spaces(m, k.unwrap_or(kmax))?;
    let k2 = other.iter().position(|e| e.dim() == m.big_n());
    if k != k2 {
        return Err(Error::Singular("span computations disagree; raise trunc or tolerance".into()));
    }
    Ok(k)
}

/// Vectors `L_beta(0)` (conjugates of the frame at 0) as columns of an
/// `N x n` matrix: coordinates of `Vbar_0` in `d/dZ`.
fn vbar_at0(frame: &CRFrame, big: usize) -> CMatrix {
    let n = frame.l.len();
    CMatrix::from_fn(big, n, |i, k| frame.l[k].coeffs[big + i].constant_term().conj())
}

/// Orthonormal basis of a subspace given by its projector, by Gram-Schmidt
/// on the projector's columns, largest residual first.
fn pivoted_basis(p: &CMatrix, tol: f64) -> CMatrix {
    let m = p.nrows();
    let mut basis: Vec<DVector<C64>> = Vec::new();
    let mut used = vec![false; m];
    loop {
        let mut best: Option<(usize, DVector<C64>, f64)> = None;
        for j in 0..m {
            if used[j] {
                continue;
            }
            let mut r = p.column(j).into_owned();
            for b in &basis {
                let c = b.dotc(&r);
                r -= b * c;
            }
            let nr = r.norm();
            if best.as_ref().map(|b| nr > b.2 + 1e-12).unwrap_or(true) {
                best = Some((j, r, nr));
            }
        }
        match best {
            Some((j, r, nr)) if nr > tol => {
                used[j] = true;
                // fix the phase: entry j real positive
                let ph = r[j] / r[j].norm();
                basis.push(r.unscale(nr) / ph);
            }
            _ => break,
        }
    }
    if basis.is_empty() {
        CMatrix::zeros(m, 0)
    } else {
        CMatrix::from_columns(&basis)
    }
}

/// `F_k = E_k^perp ∩ Vbar_0`, in frame coordinates: `c` stands for
/// `sum_beta c_beta L_beta(0)`.
pub fn f_space(m: &GenericSubmanifold, k: usize) -> Result<Subspace> {
    let frame = cr_frame(m)?;
    let es = e_spaces_gradient(m, k)?;
    let e = &es[k];
    let vb = vbar_at0(&frame, m.big_n());
    let n = m.n();
    if e.dim() == 0 {
        return Ok(Subspace { ambient: n, basis: CMatrix::identity(n, n), tol: EPS });
    }
    // covectors are the columns of e.basis: omega(v) = sum omega_l v_l
    let cond = e.basis.transpose() * &vb;
    let ns = nullspace(&cond, EPS);
    let proj = &ns * ns.adjoint();
    Ok(Subspace { ambient: n, basis: pivoted_basis(&proj, 1e-6), tol: EPS })
}

/// Components of a tensor `psi_j`: `j` CR slots (size `n`), one slot over a
/// basis of `F_{j-1}` (size `f`), one characteristic slot (size `d`).
#[derive(Clone, Debug, PartialEq)]
pub struct TensorRep {
    pub order: usize,
    pub n: usize,
    pub f_dim: usize,
    pub d: usize,
    /// Row-major over `(J_1, ..., J_j, f, l)`.
    pub data: Vec<C64>,
    /// Basis of `F_{j-1}` in frame coordinates (columns).
    pub f_basis: CMatrix,
    /// True when `F_{j-1} = {0}` and the tensor carries no information.
    pub trivial: bool,
}

impl TensorRep {
    fn index(&self, word: &[usize], f: usize, l: usize) -> usize {
        let mut i = 0;
        for &w in word {
            i = i * self.n + w;
        }
        (i * self.f_dim + f) * self.d + l
    }

    pub fn get(&self, word: &[usize], f: usize, l: usize) -> C64 {
        self.data[self.index(word, f, l)]
    }

    /// The `n x f_dim` slice for `j = 1` or the `n x n` slice at `(f, l)`
    /// for `j = 2`.
    pub fn matrix(&self, f: usize, l: usize) -> CMatrix {
        match self.order {
            1 => CMatrix::from_fn(self.n, self.f_dim, |a, b| self.get(&[a], b, l)),
            2 => CMatrix::from_fn(self.n, self.n, |a, b| self.get(&[a, b], f, l)),
            _ => panic!("matrix view needs order 1 or 2"),
        }
    }

    /// Largest deviation from symmetry under permutations of the CR slots.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for w in words_of_len(self.n, self.order) {
            let mut s = w.clone();
            s.sort_unstable();
            for f in 0..self.f_dim {
                for l in 0..self.d {
                    worst = worst.max((self.get(&w, f, l) - self.get(&s, f, l)).norm());
                }
            }
        }
        worst
    }

    /// Nested arrays `[J_1][...][J_j][f][l] -> [re, im]`.
    pub fn to_json(&self) -> serde_json::Value {
        fn nest(t: &TensorRep, prefix: &mut Vec<usize>) -> serde_json::Value {
            if prefix.len() == t.order {
                let rows: Vec<serde_json::Value> = (0..t.f_dim)
                    .map(|f| {
                        serde_json::Value::Array(
                            (0..t.d).map(|l| {
                                let c = t.get(prefix, f, l);
                                serde_json::json!([c.re, c.im])
                            }).collect(),
                        )
                    })
                    .collect();
                return serde_json::Value::Array(rows);
            }
            let mut out = Vec::with_capacity(t.n);
            for i in 0..t.n {
                prefix.push(i);
                out.push(nest(t, prefix));
                prefix.pop();
            }
            serde_json::Value::Array(out)
        }
        nest(self, &mut Vec::new())
    }
}

fn factorial(j: usize) -> f64 {
    (1..=j).map(|x| x as f64).product()
}

/// `psi_j` at 0: `(1/j!) <L^Jbar d rho_l (0), Nbar>` for `Nbar` over an
/// orthonormal basis of `F_{j-1}`.
pub fn psi(m: &GenericSubmanifold, j: usize) -> Result<TensorRep> {
    if j == 0 {
        return Err(Error::Input("tensor order starts at 1".into()));
    }
    let (n, d, big) = (m.n(), m.d(), m.big_n());
    let frame = cr_frame(m)?;
    let f = f_space(m, j - 1)?;
    let f_dim = f.dim();
    let mut t = TensorRep { order: j, n, f_dim, d, data: vec![], f_basis: f.basis.clone(), trivial: f_dim == 0 };
    t.data = vec![C64::new(0.0, 0.0); n.pow(j as u32) * f_dim * d];
    if f_dim == 0 {
        return Ok(t);
    }
    let vb = vbar_at0(&frame, big);
    let nb = &vb * &f.basis; // N x f_dim, ambient coordinates of the F basis
    let base = (0..d).map(|l| m.holo_gradient(l)).collect();
    let mut words = Words::new(&frame.l, base);
    let scale = 1.0 / factorial(j);
    for w in words_of_len(n, j) {
        for l in 0..d {
            let omega = words.covector(&w, l)?;
            for fi in 0..f_dim {
                let v: C64 = omega.iter().zip(nb.column(fi).iter()).map(|(a, b)| a * b).sum();
                let idx = t.index(&w, fi, l);
                t.data[idx] = v * scale;
            }
        }
    }
    Ok(t)
}

/// Levi form `g_{alpha-bar beta}` (`psi_1` over the full `Vbar_0`).
pub fn levi_form(h: &Hypersurface) -> Result<TensorRep> {
    psi(&GenericSubmanifold::from_hypersurface(h), 1)
}

/// Third-order tensor `h_{alpha-bar beta-bar gamma}` with `gamma` over
/// the Levi kernel (`psi_2` over `F_1`).
pub fn third_tensor(h: &Hypersurface) -> Result<TensorRep> {
    psi(&GenericSubmanifold::from_hypersurface(h), 2)
}

/// Components after the change of bases `L_gamma-bar = b^alpha_gamma L'_alpha`,
/// `theta = a theta'`:
/// `t'_{a1..aj, f} = a * b^{s1}_{a1} ... b^{sj}_{aj} t_{s1..sj, f}` with
/// the `F` slot transformed by the conjugate matrix on the same basis.
/// Only meaningful when `F` spans whole frame directions (as for
/// `j = 1`, and for `j = 2` with the basis vectors of `F_1` preserved by
/// `B`); the `F` slot is then contracted through its basis coordinates.
pub fn basis_change(t: &TensorRep, b: &CMatrix, a: C64) -> TensorRep {
    let n = t.n;
    let mut out = t.clone();
    // coordinates of b-bar acting on the F basis
    let bf = t.f_basis.adjoint() * b.map(|x| x.conj()) * &t.f_basis;
    for w in words_of_len(n, t.order) {
        for fo in 0..t.f_dim {
            for l in 0..t.d {
                let mut acc = C64::new(0.0, 0.0);
                for s in words_of_len(n, t.order) {
                    let mut coef = C64::new(1.0, 0.0);
                    for (k, &sk) in s.iter().enumerate() {
                        coef *= b[(sk, w[k])];
                    }
                    if coef.norm() == 0.0 {
                        continue;
                    }
                    for fi in 0..t.f_dim {
                        acc += coef * bf[(fi, fo)] * t.get(&s, fi, l);
                    }
                }
                let idx = out.index(&w, fo, l);
                out.data[idx] = a * acc;
            }
        }
    }
    out
}

/// Normalization relating the raw bracket `<d rho, [K, [L, Nbar]]>_0` to
/// the cubic form. Fixed once by matching `q = (i/2) h` on inputs of the
/// third-order form.
pub const CUBIC_FORM_CONSTANT: C64 = C64 { re: 0.0, im: -0.25 };

/// Cubic form `q(L_alpha-bar, L_beta-bar, Nbar)` for `Nbar` over the
/// basis of `F_1`, from nested brackets of the frame fields.
pub fn cubic_form(h: &Hypersurface) -> Result<TensorRep> {
    let raw = cubic_form_raw(h)?;
    let mut q = raw;
    for x in q.data.iter_mut() {
        *x *= CUBIC_FORM_CONSTANT;
    }
    Ok(q)
}

/// The bracket pairing without normalization.
pub fn cubic_form_raw(h: &Hypersurface) -> Result<TensorRep> {
    let m = GenericSubmanifold::from_hypersurface(h);
    let (n, big) = (m.n(), m.big_n());
    let frame = cr_frame(&m)?;
    let f = f_space(&m, 1)?;
    let f_dim = f.dim();
    let mut t = TensorRep {
        order: 2,
        n,
        f_dim,
        d: 1,
        data: vec![C64::new(0.0, 0.0); n * n * f_dim],
        f_basis: f.basis.clone(),
        trivial: f_dim == 0,
    };
    if f_dim == 0 {
        return Ok(t);
    }
    let conj_fields: Vec<VectorField> = frame.l.iter().map(|x| x.conj()).collect();
    let grad: Vec<C64> = m.holo_gradient(0).iter().map(value_at0).collect::<Result<_>>()?;
    for fi in 0..f_dim {
        let weights: Vec<C64> = (0..n).map(|b| f.basis[(b, fi)]).collect();
        let nbar = VectorField::combine(&conj_fields, &weights);
        for a in 0..n {
            let inner = frame.l[a].bracket(&nbar);
            for b in 0..n {
                let outer = frame.l[b].bracket(&inner);
                let mut v = C64::new(0.0, 0.0);
                for l in 0..big {
                    v += grad[l] * value_at0(&outer.coeffs[l])?;
                }
                let idx = t.index(&[a, b], fi, 0);
                t.data[idx] = v;
            }
        }
    }
    Ok(t)
}

/// `{"k_nondeg", "dims_E", "psi"}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TensorReport {
    pub k_nondeg: Option<usize>,
    #[serde(rename = "dims_E")]
    pub dims_e: Vec<usize>,
    pub psi: BTreeMap<String, serde_json::Value>,
}

/// Nondegeneracy, `dim E_j` for `j <= kmax`, and every nontrivial `psi_j`
/// with `j <= min(kmax, k)`.
pub fn report(m: &GenericSubmanifold, kmax: usize) -> Result<TensorReport> {
    let k = nondegeneracy(m, kmax)?;
    let es = e_spaces_gradient(m, kmax)?;
    let mut out = BTreeMap::new();
    let top = k.unwrap_or(kmax).max(1);
    for j in 1..=top {
        match psi(m, j) {
            Ok(t) if !t.trivial => {
                out.insert(j.to_string(), t.to_json());
            }
            Ok(_) => {}
            Err(Error::Truncation(_)) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(TensorReport { k_nondeg: k, dims_e: es.iter().map(|e| e.dim()).collect(), psi: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypersurface::SemidefCase;

    #[test]
    fn sphere_frame_and_levi() {
        let m = GenericSubmanifold::from_hypersurface(&Hypersurface::sphere(2, 6));
        let fr = cr_frame(&m).unwrap();
        for (k, l) in fr.l.iter().enumerate() {
            assert!(l.apply(&m.rho()[0]).max_abs() < 1e-12);
            assert_eq!(l.coeffs[3 + k].constant_term(), c64(1.0, 0.0));
            assert!(l.coeffs[3 + 2].constant_term().norm() < 1e-15);
        }
        let g = psi(&m, 1).unwrap().matrix(0, 0);
        assert!((g - CMatrix::identity(2, 2)).norm() < 1e-12);
        assert_eq!(nondegeneracy(&m, 3).unwrap(), Some(1));
    }

    #[test]
    fn flat_is_degenerate() {
        let m = GenericSubmanifold::from_hypersurface(&Hypersurface::flat(2, 8));
        let es = e_spaces(&m, 5).unwrap();
        assert!(es.iter().all(|e| e.dim() == 1));
        assert_eq!(nondegeneracy(&m, 5).unwrap(), None);
        assert_eq!(f_space(&m, 3).unwrap().dim(), 2);
    }

    #[test]
    fn model_iii_is_two_nondegenerate() {
        let h = Hypersurface::semidef_model(SemidefCase::III, &[0.0], 6);
        let m = GenericSubmanifold::from_hypersurface(&h);
        let dims: Vec<usize> = e_spaces(&m, 2).unwrap().iter().map(|e| e.dim()).collect();
        assert_eq!(dims, vec![1, 2, 3]);
        let f1 = f_space(&m, 1).unwrap();
        assert_eq!(f1.dim(), 1);
        assert!((f1.basis[(1, 0)] - c64(1.0, 0.0)).norm() < 1e-12);
        let t = psi(&m, 2).unwrap();
        assert!((t.get(&[1, 1], 0, 0) - c64(1.0, 0.0)).norm() < 1e-12);
        assert!(t.get(&[0, 1], 0, 0).norm() < 1e-12);
    }

    #[test]
    fn cubic_form_on_model() {
        let h = Hypersurface::semidef_model(SemidefCase::III, &[0.0], 6);
        let q = cubic_form(&h).unwrap();
        assert!((q.get(&[1, 1], 0, 0) - c64(0.0, 0.5)).norm() < 1e-12, "{:?}", q.data);
    }
}
