//! Real hypersurfaces `im w = phi(z, zb, re w)` given by a truncated graph.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::series::{c64, Mono, Series, SeriesJson, Space, C64};

/// Hypersurface in graph form. `phi` is real, vanishes at 0 with its
/// differential.
#[derive(Clone, Debug, PartialEq)]
pub struct Hypersurface {
    phi: Series,
}

/// Which of the three semidefinite model families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SemidefCase {
    I,
    II,
    III,
}

impl Hypersurface {
    pub fn new(phi: Series) -> Result<Hypersurface> {
        let n = match phi.space() {
            Space::Mixed(n) => n,
            sp => return Err(Error::SpaceMismatch(format!("graph must be a mixed series, got {sp:?}"))),
        };
        if n == 0 {
            return Err(Error::Input("need at least one CR variable".into()));
        }
        if !phi.is_real(1e-9 * (1.0 + phi.max_abs())) {
            return Err(Error::NonReal);
        }
        let s = Mono::var(2 * n);
        if let Some(t) = phi.terms().iter().find(|t| t.deg < 2 || t.mono == s) {
            return Err(Error::Input(format!(
                "graph must vanish to second order at 0; found the term {}",
                phi.mono_string(t.mono)
            )));
        }
        Ok(Hypersurface { phi: phi.real_part() })
    }

    pub fn n(&self) -> usize {
        self.phi.space().n()
    }

    pub fn trunc(&self) -> i32 {
        self.phi.trunc()
    }

    pub fn phi(&self) -> &Series {
        &self.phi
    }

    pub fn truncated(&self, trunc: i32) -> Hypersurface {
        Hypersurface { phi: self.phi.truncated(trunc) }
    }

    /// `im w = 0`.
    pub fn flat(n: usize, trunc: i32) -> Hypersurface {
        Hypersurface { phi: Series::zero(Space::Mixed(n), trunc) }
    }

    /// `im w = |z|^2`.
    pub fn sphere(n: usize, trunc: i32) -> Hypersurface {
        Hypersurface { phi: hermitian_form(n, n, trunc) }
    }

    /// `im w = <z', zb'> + 2 Re(zb^n p_R(z))` with `r` positive directions;
    /// `n = R.nrows() + 1`.
    pub fn model(r: usize, rmat: &CMatrix, trunc: i32) -> Hypersurface {
        let n = rmat.nrows() + 1;
        Hypersurface { phi: &bracket(n, r, trunc) + &cubic_model(rmat, trunc) }
    }

    /// The three model families for a semidefinite Levi form of rank `n-1`.
    /// `lambda` has `n - 1` entries.
    pub fn semidef_model(case: SemidefCase, lambda: &[f64], trunc: i32) -> Hypersurface {
        let n = lambda.len() + 1;
        let sp = Space::Mixed(n);
        let mut p = Series::zero(sp, trunc);
        for (k, &l) in lambda.iter().enumerate() {
            p = &p + &(&Series::var(sp, trunc, k) * &Series::var(sp, trunc, k)).scale_re(l);
        }
        let zn = Series::var(sp, trunc, n - 1);
        match case {
            SemidefCase::I if n >= 2 => {
                p = &p + &(&Series::var(sp, trunc, n - 2) * &zn).scale_re(2.0);
            }
            SemidefCase::III => p = &p + &(&zn * &zn),
            _ => {}
        }
        let zbn = Series::var(sp, trunc, 2 * n - 1);
        let c = &zbn * &p;
        let phi = &bracket(n, n - 1, trunc) + &(&c + &c.conj());
        Hypersurface { phi }
    }

    /// `im w = phi + extra`.
    pub fn plus(&self, extra: &Series) -> Result<Hypersurface> {
        if extra.space() != self.phi.space() {
            return Err(Error::SpaceMismatch("extra term lives in another space".into()));
        }
        Hypersurface::new(&self.phi + &extra.with_trunc(self.trunc().max(extra.trunc())))
    }

    pub fn to_json(&self) -> SeriesJson {
        let mut j = self.phi.to_json();
        j.real = true;
        j
    }

    pub fn from_json(j: &SeriesJson) -> Result<Hypersurface> {
        let s = Series::from_json(j)?;
        if s.space() != Space::Mixed(j.n) {
            if s.is_empty() {
                return Ok(Hypersurface::flat(j.n, j.trunc));
            }
            return Err(Error::Input("hypersurface input must use z, zbar and s exponents".into()));
        }
        Hypersurface::new(s)
    }
}

/// `sum_{j<m} |z^j|^2`.
pub fn hermitian_form(n: usize, m: usize, trunc: i32) -> Series {
    hermitian_form_rs(n, m.min(n), m.min(n), trunc)
}

fn hermitian_form_rs(n: usize, r: usize, m: usize, trunc: i32) -> Series {
    let sp = Space::Mixed(n);
    Series::from_terms(
        sp,
        trunc,
        (0..m).map(|j| {
            let sign = if j < r { 1.0 } else { -1.0 };
            (Mono::var(j).times(Mono::var(n + j)), c64(sign, 0.0))
        }),
    )
}

/// `<z', zb'>`: the form with `r` plus signs on `z^1..z^r` and minus signs
/// on `z^{r+1}..z^{n-1}`.
pub fn bracket(n: usize, r: usize, trunc: i32) -> Series {
    hermitian_form_rs(n, r, n - 1, trunc)
}

/// `p_R(z) = z'^T R z' + (z^n)^2` as a mixed series.
pub fn p_r(rmat: &CMatrix, trunc: i32) -> Series {
    let n = rmat.nrows() + 1;
    let sp = Space::Mixed(n);
    let mut terms: Vec<(Mono, C64)> = Vec::new();
    for a in 0..n - 1 {
        for b in 0..n - 1 {
            terms.push((Mono::var(a).times(Mono::var(b)), rmat[(a, b)]));
        }
    }
    terms.push((Mono::var(n - 1).times(Mono::var(n - 1)), c64(1.0, 0.0)));
    Series::from_terms(sp, trunc, terms)
}

/// `2 Re(zb^n p_R(z))`.
pub fn cubic_model(rmat: &CMatrix, trunc: i32) -> Series {
    let n = rmat.nrows() + 1;
    let c = &Series::var(Space::Mixed(n), trunc, 2 * n - 1) * &p_r(rmat, trunc);
    &c + &c.conj()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::from_real_diag;

    #[test]
    fn rejects_bad_graphs() {
        let sp = Space::Mixed(1);
        assert!(Hypersurface::new(Series::var(sp, 4, 0)).is_err());
        assert!(Hypersurface::new(Series::var(sp, 4, 2)).is_err());
        let z2 = &Series::var(sp, 4, 0) * &Series::var(sp, 4, 0);
        assert_eq!(Hypersurface::new(z2.clone()), Err(Error::NonReal));
        assert!(Hypersurface::new(&z2 + &z2.conj()).is_ok());
    }

    #[test]
    fn model_matches_semidef_iii() {
        let r = from_real_diag(&[1.0, 0.5]);
        let a = Hypersurface::model(2, &r, 6);
        let b = Hypersurface::semidef_model(SemidefCase::III, &[1.0, 0.5], 6);
        assert!(a.phi().dist(b.phi()) < 1e-15);
        assert_eq!(a.phi().len(), 2 + 2 * 3);
    }
}
