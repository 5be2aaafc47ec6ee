//! The space of normal forms for `im w = <z', zb'> + 2 Re(zb^n p_R(z)) + F`:
//! per-type subspaces, membership certificates, projection, and the
//! operator `S_R u = -<nabla', nablab'>(p_R u)`.

use std::collections::BTreeMap;

use nalgebra::DVector;

use crate::coeff::{conj_poly_diff, op_matrix, type_monomials, Basis};
use crate::error::{Error, Result};
use crate::hypersurface::{bracket, p_r};
use crate::linalg::{colspace, nullspace, CMatrix, RMatrix, EPS};
use crate::series::{c64, Mono, Series, Space, C64};

/// Truncation used for exact polynomial work.
const POLY: i32 = 100;

/// Independent real coordinates of real series of one weighted degree: for
/// each monomial `m` with `m < conj(m)` the real and imaginary part of its
/// coefficient, for self-conjugate `m` the real part.
#[derive(Clone, Debug)]
pub struct RealCoords {
    pub n: usize,
    pub nu: u32,
    /// `(monomial, is_imaginary_part)`.
    pub coords: Vec<(Mono, bool)>,
    index: BTreeMap<u128, usize>,
}

fn conj_mono(m: Mono, n: usize) -> Mono {
    let e = m.exps(2 * n + 1);
    let mut c = e[n..2 * n].to_vec();
    c.extend_from_slice(&e[..n]);
    c.push(e[2 * n]);
    Mono::from_exps(&c)
}

/// All mixed monomials of weighted degree `nu`, grouped by `s`-power and type.
pub fn degree_monomials(n: usize, nu: u32) -> Vec<Mono> {
    let mut out = Vec::new();
    for m in 0..=nu / 2 {
        let d = nu - 2 * m;
        for k in 0..=d {
            out.extend(type_monomials(n, k, d - k, m));
        }
    }
    out
}

impl RealCoords {
    pub fn new(n: usize, nu: u32) -> RealCoords {
        let mut coords = Vec::new();
        let mut index = BTreeMap::new();
        for m in degree_monomials(n, nu) {
            let c = conj_mono(m, n);
            if m.0 < c.0 {
                index.insert(m.0, coords.len());
                coords.push((m, false));
                coords.push((m, true));
            } else if m == c {
                index.insert(m.0, coords.len());
                coords.push((m, false));
            }
        }
        RealCoords { n, nu, coords, index }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Coordinates of the degree-`nu` part of a real series.
    pub fn vector(&self, s: &Series) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim());
        for t in s.terms() {
            if t.deg != self.nu {
                continue;
            }
            if let Some(&i) = self.index.get(&t.mono.0) {
                v[i] += t.c.re;
                if self.coords.get(i + 1).is_some_and(|c| c.0 == t.mono && c.1) {
                    v[i + 1] += t.c.im;
                }
            }
        }
        v
    }

    pub fn series(&self, v: &DVector<f64>, trunc: i32) -> Series {
        let sp = Space::Mixed(self.n);
        let mut terms: Vec<(Mono, C64)> = Vec::with_capacity(2 * self.dim());
        let mut i = 0;
        while i < self.dim() {
            let (m, _) = self.coords[i];
            let c = conj_mono(m, self.n);
            if c == m {
                terms.push((m, c64(v[i], 0.0)));
                i += 1;
            } else {
                terms.push((m, c64(v[i], v[i + 1])));
                terms.push((c, c64(v[i], -v[i + 1])));
                i += 2;
            }
        }
        Series::from_terms(sp, trunc, terms)
    }
}

/// Fixed data `(n, r, R)` of the partial normal form.
#[derive(Clone, Debug)]
pub struct NormalSpace {
    pub n: usize,
    pub r: usize,
    pub rmat: CMatrix,
    bracket: Series,
    pr: Series,
}

/// One type subspace: complex orthonormal basis (columns) in the monomial
/// basis of type `(k, l)` and `s`-power `m`. `None` means the full space.
#[derive(Clone, Debug)]
pub struct TypeSubspace {
    pub basis: Basis,
    pub q: Option<CMatrix>,
}

impl TypeSubspace {
    pub fn dim(&self) -> usize {
        self.q.as_ref().map_or(self.basis.len(), |q| q.ncols())
    }

    /// Orthogonal projection of a coefficient vector.
    pub fn project(&self, v: &DVector<C64>) -> DVector<C64> {
        match &self.q {
            None => v.clone(),
            Some(q) => q * (q.adjoint() * v),
        }
    }
}

/// Per-type membership residuals.
#[derive(Clone, Debug, Default)]
pub struct Certificate {
    /// Largest coefficient of the component outside its clause, by type.
    pub per_type: BTreeMap<(u32, u32), f64>,
}

impl Certificate {
    pub fn worst(&self) -> f64 {
        self.per_type.values().copied().fold(0.0, f64::max)
    }
}

impl NormalSpace {
    pub fn new(r: usize, rmat: &CMatrix) -> Result<NormalSpace> {
        let m = rmat.nrows();
        if rmat.ncols() != m {
            return Err(Error::Input("R must be square".into()));
        }
        if r > m {
            return Err(Error::Input(format!("r = {r} exceeds n - 1 = {m}")));
        }
        let n = m + 1;
        Ok(NormalSpace { n, r, rmat: rmat.clone(), bracket: bracket(n, r, POLY), pr: p_r(rmat, POLY) })
    }

    pub fn space(&self) -> Space {
        Space::Mixed(self.n)
    }

    /// `<nabla', nablab'>`.
    pub fn lap(&self, u: &Series) -> Series {
        conj_poly_diff(&self.bracket, &u.with_trunc(POLY))
    }

    /// `pbar_R(nabla)`.
    pub fn pbar_r_nabla(&self, u: &Series) -> Series {
        conj_poly_diff(&self.pr, &u.with_trunc(POLY))
    }

    /// `S_R u = -<nabla', nablab'>(p_R u)`.
    pub fn s_r(&self, u: &Series) -> Series {
        let t = u.trunc();
        (-self.lap(&(&u.with_trunc(POLY) * &self.pr))).with_trunc(t)
    }

    fn zn(&self) -> Series {
        Series::var(self.space(), POLY, self.n - 1)
    }

    fn zbn(&self) -> Series {
        Series::var(self.space(), POLY, 2 * self.n - 1)
    }

    fn op<F: Fn(&Series) -> Series>(&self, dom: &Basis, cod: &Basis, f: F) -> CMatrix {
        op_matrix(self.space(), POLY, dom, cod, f)
    }

    fn kernel<F: Fn(&Series) -> Series>(&self, dom: &Basis, cod: &Basis, f: F) -> CMatrix {
        if cod.is_empty() {
            return CMatrix::identity(dom.len(), dom.len());
        }
        nullspace(&self.op(dom, cod, f), EPS)
    }

    fn series_cols(&self, basis: &Basis, q: &CMatrix) -> Vec<Series> {
        (0..q.ncols()).map(|j| basis.series(self.space(), POLY, &q.column(j).into_owned())).collect()
    }

    /// The subspace of type `(k, l)`, `k >= l`, and `s`-power `m`.
    pub fn type_subspace(&self, k: u32, l: u32, m: u32) -> TypeSubspace {
        assert!(k >= l, "type_subspace expects k >= l");
        let n = self.n;
        let basis = Basis::new(type_monomials(n, k, l, m));
        let tb = |a: u32, b: u32| Basis::new(type_monomials(n, a, b, m));
        let sm = Series::monomial(self.space(), POLY, &s_exps(n, m), c64(1.0, 0.0));
        let br = self.bracket.clone();
        let mut extra: Vec<Series> = Vec::new();
        let kern: CMatrix = match (k, l) {
            (_, 0) => CMatrix::zeros(basis.len(), 0),
            (1, 1) => self.kernel(&basis, &tb(0, 0), |u| self.lap(u)),
            (2, 2) => {
                extra.push(&(&(&br * &self.zn()) * &self.zbn()) * &sm);
                self.kernel(&basis, &tb(1, 1), |u| self.lap(u))
            }
            (3, 3) => {
                let b2 = &br * &br;
                for j in 0..n {
                    let zbj = Series::var(self.space(), POLY, n + j);
                    let zj = Series::var(self.space(), POLY, j);
                    extra.push(&(&(&b2 * &self.zn()) * &zbj) * &sm);
                    extra.push(&(&(&b2 * &self.zbn()) * &zj) * &sm);
                }
                self.kernel(&basis, &tb(1, 1), |u| self.lap(&self.lap(u)))
            }
            (2, 1) => {
                for mono in type_monomials(n, 2, 0, m) {
                    extra.push(&Series::from_terms(self.space(), POLY, [(mono, c64(1.0, 0.0))]) * &self.zbn());
                }
                CMatrix::zeros(basis.len(), 0)
            }
            (3, 1) => self.kernel(&basis, &tb(0, 0), |u| self.lap(&self.pbar_r_nabla(u))),
            (3, 2) => {
                let b21 = tb(2, 1);
                let d2n = |u: &Series| u.deriv(n - 1).deriv(n - 1).with_trunc(POLY);
                // H21 in ker d^2/d(z^n)^2 and ker <nabla', nablab'>
                let a1 = self.op(&b21, &tb(0, 1), d2n);
                let a2 = self.op(&b21, &tb(1, 0), |u| self.lap(u));
                let stacked = stack(&a1, &a2);
                let h21 = nullspace(&stacked, EPS);
                for h in self.series_cols(&b21, &h21) {
                    extra.push(&br * &h);
                }
                extra.push(&(&(&br * &br) * &self.zn()) * &sm);
                self.kernel(&basis, &tb(2, 1), |u| self.lap(u))
            }
            (4, 2) => {
                for mono in type_monomials(n, 3, 0, m) {
                    if mono.exp(n - 1) == 0 {
                        let h = Series::from_terms(self.space(), POLY, [(mono, c64(1.0, 0.0))]);
                        extra.push(&(&br * &self.zbn()) * &h);
                    }
                }
                self.kernel(&basis, &tb(3, 1), |u| self.lap(u))
            }
            (k, 1) if k >= 4 => {
                for mono in type_monomials(n, k, 0, m) {
                    if mono.exp(n - 1) == 0 {
                        extra.push(&Series::from_terms(self.space(), POLY, [(mono, c64(1.0, 0.0))]) * &self.zbn());
                    }
                }
                CMatrix::zeros(basis.len(), 0)
            }
            _ => return TypeSubspace { basis, q: None },
        };
        let mut cols = kern.ncols() + extra.len();
        let mut all = CMatrix::zeros(basis.len(), cols.max(1));
        all.view_mut((0, 0), (basis.len(), kern.ncols())).copy_from(&kern);
        for (j, e) in extra.iter().enumerate() {
            let (v, outside) = basis.vector(e);
            debug_assert!(outside < 1e-12);
            all.set_column(kern.ncols() + j, &v);
        }
        if cols == 0 {
            cols = 0;
            return TypeSubspace { basis, q: Some(CMatrix::zeros(all.nrows(), cols)) };
        }
        TypeSubspace { basis, q: Some(colspace(&all, EPS)) }
    }

    /// Real basis (columns, in [`RealCoords`]) of the normal space at weighted
    /// degree `nu`.
    pub fn real_basis(&self, coords: &RealCoords) -> RMatrix {
        let n = self.n;
        let nu = coords.nu;
        let mut cols: Vec<DVector<f64>> = Vec::new();
        for m in 0..=nu / 2 {
            let d = nu - 2 * m;
            for l in 0..=d / 2 {
                let k = d - l;
                let sub = self.type_subspace(k, l, m);
                let sp = self.space();
                let gen: Vec<DVector<C64>> = match &sub.q {
                    None => (0..sub.basis.len())
                        .map(|i| DVector::from_fn(sub.basis.len(), |j, _| c64(if i == j { 1.0 } else { 0.0 }, 0.0)))
                        .collect(),
                    Some(q) => (0..q.ncols()).map(|j| q.column(j).into_owned()).collect(),
                };
                let mut local: Vec<DVector<f64>> = Vec::new();
                for v in gen {
                    let p = sub.basis.series(sp, POLY, &v);
                    for c in [c64(1.0, 0.0), c64(0.0, 1.0)] {
                        let pc = p.scale(c);
                        local.push(coords.vector(&(&pc + &pc.conj())));
                    }
                }
                if k == l && !local.is_empty() {
                    let a = RMatrix::from_columns(&local);
                    let c = crate::linalg::colspace_real(&a, EPS);
                    local = (0..c.ncols()).map(|j| c.column(j).into_owned()).collect();
                }
                cols.extend(local);
            }
        }
        let _ = n;
        if cols.is_empty() {
            return RMatrix::zeros(coords.dim(), 0);
        }
        RMatrix::from_columns(&cols)
    }

    /// Type-by-type membership test with residuals. Fails on non-real input.
    pub fn certificate(&self, f: &Series) -> Result<Certificate> {
        if f.space() != self.space() {
            return Err(Error::SpaceMismatch("series lives in another space".into()));
        }
        if !f.is_real(1e-9 * (1.0 + f.max_abs())) {
            return Err(Error::NonReal);
        }
        let n = self.n;
        let mut cert = Certificate::default();
        for ((k, l), part) in f.type_decompose() {
            let comp = if k >= l { part } else { part.conj() };
            let (kk, ll) = (k.max(l), k.min(l));
            let mut worst: f64 = 0.0;
            for (m, piece) in split_s(&comp, n) {
                let sub = self.type_subspace(kk, ll, m);
                let (v, _) = sub.basis.vector(&piece);
                let r = &v - sub.project(&v);
                worst = worst.max(r.iter().fold(0.0, |a, x| a.max(x.norm())));
            }
            let e = cert.per_type.entry((k, l)).or_insert(0.0);
            *e = e.max(worst);
        }
        Ok(cert)
    }

    pub fn contains(&self, f: &Series, tol: f64) -> Result<bool> {
        Ok(self.certificate(f)?.worst() <= tol * (1.0 + f.max_abs()))
    }

    /// Orthogonal projection onto the normal space, type by type; returns
    /// `(N, F - N)`.
    pub fn project(&self, f: &Series) -> Result<(Series, Series)> {
        if !f.is_real(1e-9 * (1.0 + f.max_abs())) {
            return Err(Error::NonReal);
        }
        let n = self.n;
        let sp = self.space();
        let mut out = Series::zero(sp, f.trunc());
        for ((k, l), part) in f.type_decompose() {
            if k < l {
                continue;
            }
            for (m, piece) in split_s(&part, n) {
                let sub = self.type_subspace(k, l, m);
                let (v, _) = sub.basis.vector(&piece);
                let p = sub.basis.series(sp, f.trunc(), &sub.project(&v));
                out = if k == l { &out + &p.real_part() } else { &(&out + &p) + &p.conj() };
            }
        }
        let rest = f - &out;
        Ok((out, rest))
    }
}

fn s_exps(n: usize, m: u32) -> Vec<u32> {
    let mut e = vec![0u32; 2 * n + 1];
    e[2 * n] = m;
    e
}

fn split_s(s: &Series, n: usize) -> BTreeMap<u32, Series> {
    let mut out: BTreeMap<u32, Series> = BTreeMap::new();
    for t in s.terms() {
        let m = t.mono.exp(2 * n);
        let e = out.entry(m).or_insert_with(|| Series::zero(s.space(), s.trunc()));
        *e = &*e + &Series::from_terms(s.space(), s.trunc(), [(t.mono, t.c)]);
    }
    out
}

fn stack(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(a.nrows() + b.nrows(), a.ncols());
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out.view_mut((a.nrows(), 0), (b.nrows(), b.ncols())).copy_from(b);
    out
}

/// `S_R u = -<nabla', nablab'>(p_R u)` for the data `(r, R)`.
pub fn s_r_apply(u: &Series, r: usize, rmat: &CMatrix) -> Result<Series> {
    Ok(NormalSpace::new(r, rmat)?.s_r(u))
}

/// Membership in the normal space.
pub fn is_in_normal_space(f: &Series, r: usize, rmat: &CMatrix) -> Result<bool> {
    NormalSpace::new(r, rmat)?.contains(f, 1e-9)
}

/// Projection onto the normal space and the complementary part.
pub fn project_normal(f: &Series, r: usize, rmat: &CMatrix) -> Result<(Series, Series)> {
    NormalSpace::new(r, rmat)?.project(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_r() -> CMatrix {
        CMatrix::zeros(1, 1)
    }

    #[test]
    fn s_r_examples() {
        let sp = Space::Mixed(2);
        let v = |i| Series::var(sp, 8, i);
        assert!(s_r_apply(&Series::zero(sp, 8), 1, &zero_r()).unwrap().is_empty());
        assert!(s_r_apply(&v(2), 1, &zero_r()).unwrap().is_empty());
        let u = &(&v(2) * &v(0)) * &v(3);
        let out = s_r_apply(&u, 1, &zero_r()).unwrap();
        let expect = (&(&v(1) * &v(1)) * &v(3)).scale_re(-1.0);
        assert!(out.dist(&expect) < 1e-14, "{out:?}");
    }

    #[test]
    fn membership_examples() {
        let sp = Space::Mixed(2);
        let v = |i| Series::var(sp, 8, i);
        let r = zero_r();
        assert!(is_in_normal_space(&Series::zero(sp, 8), 1, &r).unwrap());
        let f = (&v(0) * &v(2)).pow(2);
        assert!(!is_in_normal_space(&f, 1, &r).unwrap());
        let h = &v(3) * &v(0).pow(4);
        assert!(is_in_normal_space(&(&h + &h.conj()), 1, &r).unwrap());
        let bad = &v(3) * &(&v(0).pow(3) * &v(1));
        assert!(!is_in_normal_space(&(&bad + &bad.conj()), 1, &r).unwrap());
        let pure = v(0).pow(4);
        assert!(!is_in_normal_space(&(&pure + &pure.conj()), 1, &r).unwrap());
    }

    #[test]
    fn real_coords_roundtrip() {
        let c = RealCoords::new(2, 4);
        assert_eq!(c.dim(), 46);
        let sp = Space::Mixed(2);
        let t = Series::monomial(sp, 6, &[1, 2, 0, 1, 0], c64(0.5, -2.0));
        let s = &t + &t.conj();
        let v = c.vector(&s);
        assert!(c.series(&v, 6).dist(&s) < 1e-15);
    }
}

#[cfg(test)]
mod dim_tests {
    use super::*;

    #[test]
    fn dimensions() {
        let ns = NormalSpace::new(1, &CMatrix::zeros(1, 1)).unwrap();
        let got: Vec<usize> = (4..=8).map(|nu| ns.real_basis(&RealCoords::new(2, nu)).ncols()).collect();
        assert_eq!(got, vec![23, 26, 56, 104, 173]);
        let r = crate::linalg::from_real_diag(&[0.3, 0.0]);
        let ns = NormalSpace::new(2, &r).unwrap();
        let got: Vec<usize> = (4..=7).map(|nu| ns.real_basis(&RealCoords::new(3, nu)).ncols()).collect();
        assert_eq!(got, vec![94, 132, 330, 698]);
    }
}
