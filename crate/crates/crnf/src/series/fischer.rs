//! Fischer decompositions `F = pG + H` with `pbar(nabla) H = 0`, and the
//! two-factor variant `F = pG1 + qG2 + H`.

use std::collections::BTreeSet;

use nalgebra::DVector;

use super::{Series, Space};
use crate::coeff::{conj_poly_diff, type_monomials, Basis};
use crate::error::{Error, Result};
use crate::linalg::{colspace, lstsq, rank, CMatrix, EPS};
use crate::series::C64;

const POLY_TRUNC: i32 = 100;

/// Output of [`fischer_decompose`].
#[derive(Clone, Debug)]
pub struct Fischer {
    pub g: Series,
    pub h: Series,
    /// Largest coefficient of `pG + H - F`.
    pub residual: f64,
    /// Largest coefficient of `pbar(nabla) H`.
    pub side_residual: f64,
}

/// Output of [`fischer_decompose2`].
#[derive(Clone, Debug)]
pub struct Fischer2 {
    pub g1: Series,
    pub g2: Series,
    pub h: Series,
    pub residual: f64,
    /// Largest coefficient of `qbar(nabla) H`.
    pub q_side_residual: f64,
    /// Distance of `pbar(nabla) H` from the image of `S`.
    pub s_side_residual: f64,
    /// Dimension of the solution set of the stated conditions (0 = unique).
    pub freedom: usize,
}

fn single_type(s: &Series, what: &str) -> Result<Option<(u32, u32)>> {
    let types: BTreeSet<(u32, u32)> = s.terms().iter().map(|t| s.type_of(t.mono)).collect();
    match types.len() {
        0 => Ok(None),
        1 => Ok(types.into_iter().next()),
        _ => Err(Error::Input(format!("{what} is not of a single type"))),
    }
}

fn s_powers(s: &Series) -> BTreeSet<u32> {
    let n = s.space().n();
    s.terms().iter().map(|t| t.mono.exp(2 * n)).collect()
}

fn check_inputs(f: &Series, ps: &[&Series]) -> Result<usize> {
    let n = match f.space() {
        Space::Mixed(n) => n,
        sp => return Err(Error::SpaceMismatch(format!("expected a mixed series, got {sp:?}"))),
    };
    for p in ps {
        if p.space() != f.space() {
            return Err(Error::SpaceMismatch("factor lives in another space".into()));
        }
        if p.terms().iter().any(|t| t.mono.exp(2 * n) > 0) {
            return Err(Error::Input("factor must not depend on s".into()));
        }
    }
    Ok(n)
}

fn exact(s: &Series) -> Series {
    s.with_trunc(POLY_TRUNC)
}

/// `F = pG + H` with `pbar(nabla, nablab) H = 0`. `F` must be of one type
/// `(k, l)` (any powers of `s`), `p` of one type `(a, b)` with `k >= a`,
/// `l >= b`.
pub fn fischer_decompose(f: &Series, p: &Series) -> Result<Fischer> {
    let n = check_inputs(f, &[p])?;
    let sp = f.space();
    let (fe, pe) = (exact(f), exact(p));
    let ab = single_type(p, "p")?.ok_or_else(|| Error::Input("p is zero".into()))?;
    let Some(kl) = single_type(f, "F")? else {
        let z = Series::zero(sp, f.trunc());
        return Ok(Fischer { g: z.clone(), h: z, residual: 0.0, side_residual: 0.0 });
    };
    if kl.0 < ab.0 || kl.1 < ab.1 {
        return Err(Error::Input(format!("type {kl:?} is not divisible by type {ab:?}")));
    }
    let mut g = Series::zero(sp, POLY_TRUNC);
    for m in s_powers(f) {
        let dom = Basis::new(type_monomials(n, kl.0 - ab.0, kl.1 - ab.1, m));
        let cod = Basis::new(type_monomials(n, kl.0, kl.1, m));
        let mult = crate::coeff::op_matrix(sp, POLY_TRUNC, &dom, &cod, |u| u * &pe);
        let diff = crate::coeff::op_matrix(sp, POLY_TRUNC, &cod, &dom, |u| conj_poly_diff(&pe, u));
        let (fv, _) = cod.vector(&fe);
        let a = &diff * &mult;
        let gv = lstsq(&a, &(&diff * &fv), 1e-13);
        g = &g + &dom.series(sp, POLY_TRUNC, &gv);
    }
    let h = &fe - &(&g * &pe);
    let residual = (&(&(&g * &pe) + &h) - &fe).max_abs();
    let side_residual = conj_poly_diff(&pe, &h).max_abs();
    Ok(Fischer { g: g.with_trunc(f.trunc()), h: h.with_trunc(f.trunc()), residual, side_residual })
}

/// `F = pG1 + qG2 + H` with `qbar(nabla) H = 0` and `pbar(nabla) H` in the
/// image of `S u = -pbar(nabla)(q u)`. The conditions do not always pin the
/// decomposition down; the minimum-norm solution is returned and the
/// remaining freedom is reported.
pub fn fischer_decompose2(f: &Series, p: &Series, q: &Series) -> Result<Fischer2> {
    let n = check_inputs(f, &[p, q])?;
    let sp = f.space();
    let (fe, pe, qe) = (exact(f), exact(p), exact(q));
    let ab = single_type(p, "p")?.ok_or_else(|| Error::Input("p is zero".into()))?;
    let cd = single_type(q, "q")?.ok_or_else(|| Error::Input("q is zero".into()))?;
    let zero = Series::zero(sp, f.trunc());
    let Some(kl) = single_type(f, "F")? else {
        return Ok(Fischer2 {
            g1: zero.clone(),
            g2: zero.clone(),
            h: zero,
            residual: 0.0,
            q_side_residual: 0.0,
            s_side_residual: 0.0,
            freedom: 0,
        });
    };
    if kl.0 < ab.0 || kl.1 < ab.1 || kl.0 < cd.0 || kl.1 < cd.1 {
        return Err(Error::Input(format!("type {kl:?} is not compatible with the factor types")));
    }
    let mut g1 = Series::zero(sp, POLY_TRUNC);
    let mut g2 = Series::zero(sp, POLY_TRUNC);
    let mut h = Series::zero(sp, POLY_TRUNC);
    let mut freedom = 0;
    for m in s_powers(f) {
        let b1 = Basis::new(type_monomials(n, kl.0 - ab.0, kl.1 - ab.1, m));
        let b2 = Basis::new(type_monomials(n, kl.0 - cd.0, kl.1 - cd.1, m));
        let bf = Basis::new(type_monomials(n, kl.0, kl.1, m));
        // qbar(nabla) H lands in type (k-c, l-d); pbar(nabla) H in (k-a, l-b).
        let bq = b2.clone();
        let bp = b1.clone();
        let mp = crate::coeff::op_matrix(sp, POLY_TRUNC, &b1, &bf, |u| u * &pe);
        let mq = crate::coeff::op_matrix(sp, POLY_TRUNC, &b2, &bf, |u| u * &qe);
        let dq = crate::coeff::op_matrix(sp, POLY_TRUNC, &bf, &bq, |u| conj_poly_diff(&qe, u));
        let dp = crate::coeff::op_matrix(sp, POLY_TRUNC, &bf, &bp, |u| conj_poly_diff(&pe, u));
        let s_op = crate::coeff::op_matrix(sp, POLY_TRUNC, &b2, &bp, |u| -conj_poly_diff(&pe, &(u * &qe)));
        let img = colspace(&s_op, EPS);
        let proj = CMatrix::identity(bp.len(), bp.len()) - &img * img.adjoint();
        let side = &proj * &dp;
        let (n1, n2, nh) = (b1.len(), b2.len(), bf.len());
        let rows = nh + bq.len() + bp.len();
        let cols = n1 + n2 + nh;
        let mut a = CMatrix::zeros(rows, cols);
        a.view_mut((0, 0), (nh, n1)).copy_from(&mp);
        a.view_mut((0, n1), (nh, n2)).copy_from(&mq);
        a.view_mut((0, n1 + n2), (nh, nh)).copy_from(&CMatrix::identity(nh, nh));
        a.view_mut((nh, n1 + n2), (bq.len(), nh)).copy_from(&dq);
        a.view_mut((nh + bq.len(), n1 + n2), (bp.len(), nh)).copy_from(&side);
        let (fv, _) = bf.vector(&fe);
        let mut rhs = DVector::<C64>::zeros(rows);
        rhs.rows_mut(0, nh).copy_from(&fv);
        let x = lstsq(&a, &rhs, 1e-12);
        freedom += cols - rank(&a, 1e-12);
        g1 = &g1 + &b1.series(sp, POLY_TRUNC, &x.rows(0, n1).into_owned());
        g2 = &g2 + &b2.series(sp, POLY_TRUNC, &x.rows(n1, n2).into_owned());
        h = &h + &bf.series(sp, POLY_TRUNC, &x.rows(n1 + n2, nh).into_owned());
    }
    let recon = &(&(&g1 * &pe) + &(&g2 * &qe)) + &h;
    let residual = (&recon - &fe).max_abs();
    let q_side_residual = conj_poly_diff(&qe, &h).max_abs();
    let s_side_residual = distance_from_image(&pe, &qe, &h, n)?;
    let t = f.trunc();
    Ok(Fischer2 {
        g1: g1.with_trunc(t),
        g2: g2.with_trunc(t),
        h: h.with_trunc(t),
        residual,
        q_side_residual,
        s_side_residual,
        freedom,
    })
}

/// Distance of `pbar(nabla) H` from `im S`, measured per power of `s`.
fn distance_from_image(p: &Series, q: &Series, h: &Series, n: usize) -> Result<f64> {
    let sp = h.space();
    let target = conj_poly_diff(p, h);
    if target.is_empty() {
        return Ok(0.0);
    }
    let ab = single_type(p, "p")?.unwrap();
    let cd = single_type(q, "q")?.unwrap();
    let kl = single_type(h, "H")?.unwrap();
    let mut worst: f64 = 0.0;
    for m in s_powers(&target) {
        let b2 = Basis::new(type_monomials(n, kl.0 - cd.0, kl.1 - cd.1, m));
        let bp = Basis::new(type_monomials(n, kl.0 - ab.0, kl.1 - ab.1, m));
        let s_op = crate::coeff::op_matrix(sp, POLY_TRUNC, &b2, &bp, |u| -conj_poly_diff(p, &(u * q)));
        let img = colspace(&s_op, EPS);
        let (v, _) = bp.vector(&target);
        let r = &v - &img * (img.adjoint() * &v);
        worst = worst.max(r.iter().fold(0.0, |a, x| a.max(x.norm())));
    }
    Ok(worst)
}
