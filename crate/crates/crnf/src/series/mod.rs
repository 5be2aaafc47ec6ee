//! Truncated formal power series with weighted grading.
//!
//! One storage type, [`Series`], serves every variable layout used in the
//! crate; the layout is described by a [`Space`]. Monomials are packed eight
//! bits per variable into a `u128`, with variable 0 in the most significant
//! byte, so sorting terms by `(weighted degree, packed key)` gives graded
//! lexicographic order.

mod arith;
mod decomp;
pub mod fischer;
mod graph;
mod json;
mod subst;

use std::fmt;

pub use graph::{complex_to_graph, graph_to_complex};
pub use json::{SeriesJson, TermJson};
pub use num_complex::Complex64 as C64;

/// Coefficients below this modulus are dropped by arithmetic.
pub const PRUNE: f64 = 1e-14;
/// Largest supported truncation order (keeps exponents inside one byte).
pub const MAX_TRUNC: i32 = 120;
const MAX_VARS: usize = 16;

/// Variable layout of a series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Space {
    /// `z1..zn, zb1..zbn, s` with weights 1, 1, 2.
    Mixed(usize),
    /// `z1..zn, w` with weights 1, 2.
    Holo(usize),
    /// `z1..zn, zb1..zbn, wb`: complex defining functions `w = Q(z, zb, wb)`.
    Complexified(usize),
    /// `z1..zn, zb1..zbn, s, t` where `w = s + i t`.
    Slice(usize),
    /// `Z1..ZN, Zb1..ZbN` with `N = n + d`. When `heavy`, the last `d`
    /// coordinates (and their conjugates) have weight 2.
    Ambient { n: usize, d: usize, heavy: bool },
}

impl Space {
    /// Number of CR variables `z`.
    pub fn n(&self) -> usize {
        match *self {
            Space::Mixed(n) | Space::Holo(n) | Space::Complexified(n) | Space::Slice(n) => n,
            Space::Ambient { n, .. } => n,
        }
    }

    pub fn nvars(&self) -> usize {
        match *self {
            Space::Mixed(n) | Space::Complexified(n) => 2 * n + 1,
            Space::Holo(n) => n + 1,
            Space::Slice(n) => 2 * n + 2,
            Space::Ambient { n, d, .. } => 2 * (n + d),
        }
    }

    pub fn weight(&self, i: usize) -> u32 {
        match *self {
            Space::Mixed(n) | Space::Complexified(n) | Space::Slice(n) => {
                if i < 2 * n {
                    1
                } else {
                    2
                }
            }
            Space::Holo(n) => {
                if i < n {
                    1
                } else {
                    2
                }
            }
            Space::Ambient { n, d, heavy } => {
                let big = n + d;
                let j = i % big;
                if heavy && j >= n {
                    2
                } else {
                    1
                }
            }
        }
    }

    pub fn var_name(&self, i: usize) -> String {
        match *self {
            Space::Mixed(n) | Space::Complexified(n) | Space::Slice(n) => {
                if i < n {
                    format!("z{}", i + 1)
                } else if i < 2 * n {
                    format!("zb{}", i - n + 1)
                } else {
                    match (self, i - 2 * n) {
                        (Space::Mixed(_), _) => "s".into(),
                        (Space::Complexified(_), _) => "wb".into(),
                        (_, 0) => "s".into(),
                        _ => "t".into(),
                    }
                }
            }
            Space::Holo(n) => {
                if i < n {
                    format!("z{}", i + 1)
                } else {
                    "w".into()
                }
            }
            Space::Ambient { n, d, .. } => {
                let big = n + d;
                if i < big {
                    format!("Z{}", i + 1)
                } else {
                    format!("Zb{}", i - big + 1)
                }
            }
        }
    }

    /// Index of the conjugate variable, when conjugation acts inside the space.
    pub fn conj_var(&self, i: usize) -> Option<usize> {
        match *self {
            Space::Mixed(n) | Space::Slice(n) => Some(if i < n {
                i + n
            } else if i < 2 * n {
                i - n
            } else {
                i
            }),
            Space::Ambient { n, d, .. } => {
                let big = n + d;
                Some(if i < big { i + big } else { i - big })
            }
            _ => None,
        }
    }

    pub fn has_conj(&self) -> bool {
        matches!(self, Space::Mixed(_) | Space::Slice(_) | Space::Ambient { .. })
    }

    /// `(z block, zb block)` start indices for spaces carrying a type bidegree.
    pub fn type_blocks(&self) -> Option<(usize, usize, usize)> {
        match *self {
            Space::Mixed(n) | Space::Complexified(n) | Space::Slice(n) => Some((0, n, n)),
            Space::Ambient { n, d, .. } => Some((0, n + d, n + d)),
            Space::Holo(_) => None,
        }
    }
}

/// Packed exponent vector.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Mono(pub u128);

impl Mono {
    pub const ONE: Mono = Mono(0);

    #[inline]
    fn shift(i: usize) -> u32 {
        ((MAX_VARS - 1 - i) * 8) as u32
    }

    #[inline]
    pub fn exp(self, i: usize) -> u32 {
        ((self.0 >> Self::shift(i)) & 0xff) as u32
    }

    pub fn var(i: usize) -> Mono {
        Mono(1u128 << Self::shift(i))
    }

    pub fn from_exps(e: &[u32]) -> Mono {
        assert!(e.len() <= MAX_VARS, "too many variables");
        let mut m = 0u128;
        for (i, &x) in e.iter().enumerate() {
            assert!(x < 256, "exponent overflow");
            m |= (x as u128) << Self::shift(i);
        }
        Mono(m)
    }

    pub fn exps(self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|i| self.exp(i)).collect()
    }

    #[inline]
    pub fn times(self, o: Mono) -> Mono {
        Mono(self.0 + o.0)
    }

    pub fn with_exp(self, i: usize, e: u32) -> Mono {
        let s = Self::shift(i);
        Mono((self.0 & !(0xffu128 << s)) | ((e as u128) << s))
    }

    pub fn degree(self, space: &Space) -> u32 {
        (0..space.nvars()).map(|i| self.exp(i) * space.weight(i)).sum()
    }

    /// Total exponent over the index range `[lo, lo + len)`.
    pub fn block_sum(self, lo: usize, len: usize) -> u32 {
        (lo..lo + len).map(|i| self.exp(i)).sum()
    }
}

/// One stored coefficient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub deg: u32,
    pub mono: Mono,
    pub c: C64,
}

/// Truncated series: every stored term has weighted degree `<= trunc`, and
/// terms above `trunc` are unknown rather than zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    space: Space,
    trunc: i32,
    terms: Vec<Term>,
}

/// Series in `(z, zb, s)`.
pub type MixedSeries = Series;
/// Series in `(z, w)`.
pub type HoloSeries = Series;

impl Series {
    pub fn zero(space: Space, trunc: i32) -> Series {
        assert!(space.nvars() <= MAX_VARS, "too many variables");
        assert!(trunc <= MAX_TRUNC, "truncation order too large");
        Series { space, trunc, terms: Vec::new() }
    }

    pub fn constant(space: Space, trunc: i32, c: C64) -> Series {
        Series::from_terms(space, trunc, [(Mono::ONE, c)])
    }

    pub fn one(space: Space, trunc: i32) -> Series {
        Series::constant(space, trunc, C64::new(1.0, 0.0))
    }

    pub fn var(space: Space, trunc: i32, i: usize) -> Series {
        Series::from_terms(space, trunc, [(Mono::var(i), C64::new(1.0, 0.0))])
    }

    pub fn monomial(space: Space, trunc: i32, exps: &[u32], c: C64) -> Series {
        Series::from_terms(space, trunc, [(Mono::from_exps(exps), c)])
    }

    /// Build from `(monomial, coefficient)` pairs; repeated monomials add up,
    /// terms above `trunc` and below the pruning threshold are dropped.
    pub fn from_terms<I: IntoIterator<Item = (Mono, C64)>>(space: Space, trunc: i32, it: I) -> Series {
        let mut map: rustc_hash::FxHashMap<u128, C64> = Default::default();
        for (m, c) in it {
            *map.entry(m.0).or_default() += c;
        }
        Series::from_map(space, trunc, map)
    }

    pub(crate) fn from_map(space: Space, trunc: i32, map: rustc_hash::FxHashMap<u128, C64>) -> Series {
        let mut terms: Vec<Term> = map
            .into_iter()
            .filter(|(_, c)| c.norm() >= PRUNE)
            .map(|(m, c)| {
                let mono = Mono(m);
                Term { deg: mono.degree(&space), mono, c }
            })
            .filter(|t| (t.deg as i32) <= trunc)
            .collect();
        terms.sort_unstable_by(|a, b| (a.deg, a.mono).cmp(&(b.deg, b.mono)));
        let mut s = Series::zero(space, trunc);
        s.terms = terms;
        s
    }

    /// Terms already sorted and unique.
    pub(crate) fn from_sorted(space: Space, trunc: i32, terms: Vec<Term>) -> Series {
        Series { space, trunc, terms }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn trunc(&self) -> i32 {
        self.trunc
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: Mono) -> C64 {
        let deg = m.degree(&self.space);
        match self.terms.binary_search_by(|t| (t.deg, t.mono).cmp(&(deg, m))) {
            Ok(i) => self.terms[i].c,
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn coeff_of(&self, exps: &[u32]) -> C64 {
        self.coeff(Mono::from_exps(exps))
    }

    pub fn constant_term(&self) -> C64 {
        self.coeff(Mono::ONE)
    }

    /// Lowest weighted degree carrying a coefficient above `tol`.
    pub fn valuation(&self, tol: f64) -> Option<u32> {
        self.terms.iter().find(|t| t.c.norm() > tol).map(|t| t.deg)
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.iter().fold(0.0, |m, t| m.max(t.c.norm()))
    }

    /// Largest coefficient modulus of `self - other` over the common range.
    pub fn dist(&self, other: &Series) -> f64 {
        let t = self.trunc.min(other.trunc);
        (self - other).truncated(t).max_abs()
    }

    /// Lower the truncation order, dropping higher terms.
    pub fn truncated(&self, trunc: i32) -> Series {
        let t = trunc.min(self.trunc);
        let terms = self.terms.iter().copied().filter(|x| x.deg as i32 <= t).collect();
        Series::from_sorted(self.space, t, terms)
    }

    /// Same coefficients with a larger declared truncation. Used when a
    /// series is known to be exact (polynomial).
    pub fn with_trunc(&self, trunc: i32) -> Series {
        let mut s = self.truncated(trunc);
        s.trunc = trunc;
        s
    }

    pub fn map_coeffs<F: Fn(Mono, C64) -> C64>(&self, f: F) -> Series {
        Series::from_terms(self.space, self.trunc, self.terms.iter().map(|t| (t.mono, f(t.mono, t.c))))
    }

    pub fn filter<F: Fn(&Term) -> bool>(&self, f: F) -> Series {
        let terms = self.terms.iter().copied().filter(|t| f(t)).collect();
        Series::from_sorted(self.space, self.trunc, terms)
    }

    /// Weighted homogeneous part of degree `deg`.
    pub fn homogeneous(&self, deg: u32) -> Series {
        self.filter(|t| t.deg == deg)
    }

    /// Largest `|c - conj(c')|` over conjugate pairs; `None` if the space has
    /// no conjugation.
    pub fn reality_defect(&self) -> Option<f64> {
        if !self.space.has_conj() {
            return None;
        }
        Some((self - &self.conj()).max_abs())
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.reality_defect().map(|d| d <= tol).unwrap_or(false)
    }

    /// Move to another layout by renaming variables: old variable `i` becomes
    /// new variable `map[i]`. Variables mapped to `None` must not occur.
    pub fn relabel(&self, space: Space, map: &[Option<usize>]) -> Series {
        let nv = self.space.nvars();
        Series::from_terms(
            space,
            self.trunc,
            self.terms.iter().map(|t| {
                let mut m = Mono::ONE;
                for i in 0..nv {
                    let e = t.mono.exp(i);
                    if e > 0 {
                        let j = map[i].expect("relabel: variable has no target");
                        m = m.times(Mono::ONE.with_exp(j, e));
                    }
                }
                (m, t.c)
            }),
        )
    }

    /// Render a monomial with variable names.
    pub fn mono_string(&self, m: Mono) -> String {
        let mut parts = Vec::new();
        for i in 0..self.space.nvars() {
            match m.exp(i) {
                0 => {}
                1 => parts.push(self.space.var_name(i)),
                e => parts.push(format!("{}^{}", self.space.var_name(i), e)),
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 + O({})", self.trunc + 1);
        }
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i)*{}", t.c.re, t.c.im, self.mono_string(t.mono))?;
        }
        write!(f, " + O({})", self.trunc + 1)
    }
}

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packing_roundtrip() {
        let m = Mono::from_exps(&[3, 0, 7, 1]);
        assert_eq!(m.exps(4), vec![3, 0, 7, 1]);
        assert_eq!(m.with_exp(1, 2).exps(4), vec![3, 2, 7, 1]);
        assert_eq!(Mono::var(2).times(m).exp(2), 8);
    }

    #[test]
    fn ordering_is_graded_lex() {
        let sp = Space::Mixed(1);
        let s = Series::from_terms(
            sp,
            6,
            [
                (Mono::from_exps(&[0, 0, 1]), c64(1.0, 0.0)),
                (Mono::from_exps(&[1, 1, 0]), c64(1.0, 0.0)),
                (Mono::from_exps(&[2, 0, 0]), c64(1.0, 0.0)),
                (Mono::from_exps(&[1, 0, 0]), c64(1.0, 0.0)),
            ],
        );
        let keys: Vec<_> = s.terms().iter().map(|t| t.mono.exps(3)).collect();
        assert_eq!(keys, vec![vec![1, 0, 0], vec![0, 0, 1], vec![1, 1, 0], vec![2, 0, 0]]);
    }

    #[test]
    fn weights() {
        let sp = Space::Ambient { n: 2, d: 1, heavy: true };
        assert_eq!(sp.nvars(), 6);
        assert_eq!((0..6).map(|i| sp.weight(i)).collect::<Vec<_>>(), vec![1, 1, 2, 1, 1, 2]);
        assert_eq!(sp.conj_var(4), Some(1));
        assert_eq!(Space::Slice(2).var_name(5), "t");
    }
}
