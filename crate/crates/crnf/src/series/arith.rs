use std::ops::{Add, Mul, Neg, Sub};

use rustc_hash::FxHashMap;

use super::{Mono, Series, Term, C64, PRUNE};
use crate::error::{Error, Result};

fn check_space(a: &Series, b: &Series) {
    assert_eq!(a.space, b.space, "series in different spaces");
}

/// Merge two sorted term lists.
fn merge(a: &[Term], b: &[Term], sb: f64, trunc: i32) -> Vec<Term> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && (a[i].deg, a[i].mono) < (b[j].deg, b[j].mono));
        let take_b = i >= a.len() || (j < b.len() && (b[j].deg, b[j].mono) < (a[i].deg, a[i].mono));
        let t = if take_a {
            i += 1;
            a[i - 1]
        } else if take_b {
            j += 1;
            Term { c: b[j - 1].c * sb, ..b[j - 1] }
        } else {
            i += 1;
            j += 1;
            Term { c: a[i - 1].c + b[j - 1].c * sb, ..a[i - 1] }
        };
        if t.deg as i32 <= trunc && t.c.norm() >= PRUNE {
            out.push(t);
        }
    }
    out
}

impl Series {
    pub fn scale(&self, k: C64) -> Series {
        let terms = self
            .terms
            .iter()
            .map(|t| Term { c: t.c * k, ..*t })
            .filter(|t| t.c.norm() >= PRUNE)
            .collect();
        Series::from_sorted(self.space, self.trunc, terms)
    }

    pub fn scale_re(&self, k: f64) -> Series {
        self.scale(C64::new(k, 0.0))
    }

    /// `self + k * other`.
    pub fn axpy(&self, k: f64, other: &Series) -> Series {
        check_space(self, other);
        let trunc = self.trunc.min(other.trunc);
        Series::from_sorted(self.space, trunc, merge(&self.terms, &other.terms, k, trunc))
    }

    /// Product keeping only weighted degrees `<= limit` (and `<= ` both truncs).
    pub fn mul_trunc(&self, other: &Series, limit: i32) -> Series {
        self.mul_raw(other, self.trunc.min(other.trunc).min(limit))
    }

    /// Product of the stored terms up to degree `trunc`, declared valid
    /// through `trunc`. The caller vouches for that (e.g. from valuations).
    pub(crate) fn mul_raw(&self, other: &Series, trunc: i32) -> Series {
        check_space(self, other);
        if trunc < 0 || self.terms.is_empty() || other.terms.is_empty() {
            return Series::zero(self.space, trunc);
        }
        let mut acc: FxHashMap<u128, C64> = FxHashMap::default();
        acc.reserve(self.terms.len().max(other.terms.len()) * 2);
        for ta in &self.terms {
            let room = trunc - ta.deg as i32;
            if room < 0 {
                break;
            }
            for tb in &other.terms {
                if tb.deg as i32 > room {
                    break;
                }
                *acc.entry(ta.mono.0 + tb.mono.0).or_default() += ta.c * tb.c;
            }
        }
        Series::from_map(self.space, trunc, acc)
    }

    /// Product with the truncation justified by valuations:
    /// `(A + O(a)) (B + O(b))` is known through `min(a + val B, b + val A)`.
    pub fn mul_val(&self, other: &Series) -> Series {
        let va = self.valuation(0.0).map(|v| v as i32).unwrap_or(self.trunc + 1);
        let vb = other.valuation(0.0).map(|v| v as i32).unwrap_or(other.trunc + 1);
        let t = (self.trunc + vb).min(other.trunc + va).min(super::MAX_TRUNC);
        self.mul_raw(other, t)
    }

    pub fn pow(&self, k: u32) -> Series {
        let mut r = Series::one(self.space, self.trunc);
        for _ in 0..k {
            r = &r * self;
        }
        r
    }

    /// Complex conjugate: swaps each variable with its conjugate and
    /// conjugates coefficients.
    pub fn conj(&self) -> Series {
        let sp = self.space;
        assert!(sp.has_conj(), "conjugation not defined on {sp:?}");
        let nv = sp.nvars();
        let perm: Vec<usize> = (0..nv).map(|i| sp.conj_var(i).unwrap()).collect();
        Series::from_terms(
            sp,
            self.trunc,
            self.terms.iter().map(|t| {
                let mut m = Mono::ONE;
                for i in 0..nv {
                    let e = t.mono.exp(i);
                    if e > 0 {
                        m = m.with_exp(perm[i], e);
                    }
                }
                (m, t.c.conj())
            }),
        )
    }

    /// `(self + conj(self)) / 2`.
    pub fn real_part(&self) -> Series {
        (self + &self.conj()).scale_re(0.5)
    }

    /// Formal partial derivative; truncation drops by the variable's weight.
    pub fn deriv(&self, var: usize) -> Series {
        let w = self.space.weight(var);
        let terms = self
            .terms
            .iter()
            .filter_map(|t| {
                let e = t.mono.exp(var);
                if e == 0 {
                    return None;
                }
                Some(Term { deg: t.deg - w, mono: t.mono.with_exp(var, e - 1), c: t.c * e as f64 })
            })
            .collect::<Vec<_>>();
        Series::from_terms(self.space, self.trunc - w as i32, terms.into_iter().map(|t| (t.mono, t.c)))
    }

    /// Multiply by a monomial.
    pub fn shift_by(&self, m: Mono, c: C64) -> Series {
        let d = m.degree(&self.space);
        let terms = self
            .terms
            .iter()
            .map(|t| Term { deg: t.deg + d, mono: t.mono.times(m), c: t.c * c })
            .filter(|t| t.deg as i32 <= self.trunc && t.c.norm() >= PRUNE)
            .collect();
        Series::from_sorted(self.space, self.trunc, terms)
    }

    pub fn checked_add(&self, other: &Series) -> Result<Series> {
        same_space(self, other)?;
        Ok(self + other)
    }

    pub fn checked_mul(&self, other: &Series) -> Result<Series> {
        same_space(self, other)?;
        Ok(self * other)
    }
}

fn same_space(a: &Series, b: &Series) -> Result<()> {
    if a.space != b.space {
        return Err(Error::SpaceMismatch(format!("{:?} vs {:?}", a.space, b.space)));
    }
    Ok(())
}

impl Add for &Series {
    type Output = Series;
    fn add(self, o: &Series) -> Series {
        self.axpy(1.0, o)
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, o: &Series) -> Series {
        self.axpy(-1.0, o)
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        self.scale_re(-1.0)
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, o: &Series) -> Series {
        self.mul_trunc(o, i32::MAX)
    }
}

impl Neg for Series {
    type Output = Series;
    fn neg(self) -> Series {
        self.scale_re(-1.0)
    }
}

impl Add for Series {
    type Output = Series;
    fn add(self, o: Series) -> Series {
        &self + &o
    }
}

impl Sub for Series {
    type Output = Series;
    fn sub(self, o: Series) -> Series {
        &self - &o
    }
}

impl Mul for Series {
    type Output = Series;
    fn mul(self, o: Series) -> Series {
        &self * &o
    }
}
