//! Coefficient-space views of homogeneous mixed series: monomial bases,
//! vectorization, and matrices of linear operators.

use nalgebra::DVector;
use rustc_hash::FxHashMap;

use crate::linalg::CMatrix;
use crate::series::{Mono, Series, Space, C64};

/// All exponent vectors in `nv` variables with total degree `deg`, in
/// lexicographic order.
pub fn compositions(nv: usize, deg: u32) -> Vec<Vec<u32>> {
    fn go(nv: usize, deg: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() + 1 == nv {
            cur.push(deg);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in (0..=deg).rev() {
            cur.push(k);
            go(nv, deg - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if nv == 0 {
        if deg == 0 {
            out.push(vec![]);
        }
        return out;
    }
    go(nv, deg, &mut Vec::new(), &mut out);
    out.reverse();
    out
}

/// Monomials `z^a zb^b s^m` of type `(k, l)` in `Space::Mixed(n)`.
pub fn type_monomials(n: usize, k: u32, l: u32, m: u32) -> Vec<Mono> {
    let mut out = Vec::new();
    for a in compositions(n, k) {
        for b in compositions(n, l) {
            let mut e = a.clone();
            e.extend_from_slice(&b);
            e.push(m);
            out.push(Mono::from_exps(&e));
        }
    }
    out
}

/// Holomorphic monomials `z^a w^m` with `|a| = k`.
pub fn holo_monomials(n: usize, k: u32, m: u32) -> Vec<Mono> {
    compositions(n, k)
        .into_iter()
        .map(|mut a| {
            a.push(m);
            Mono::from_exps(&a)
        })
        .collect()
}

/// Ordered monomial basis with fast lookup.
#[derive(Clone, Debug)]
pub struct Basis {
    pub monos: Vec<Mono>,
    index: FxHashMap<u128, usize>,
}

impl Basis {
    pub fn new(monos: Vec<Mono>) -> Basis {
        let index = monos.iter().enumerate().map(|(i, m)| (m.0, i)).collect();
        Basis { monos, index }
    }

    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn pos(&self, m: Mono) -> Option<usize> {
        self.index.get(&m.0).copied()
    }

    /// Coefficient vector; also returns the largest coefficient outside the basis.
    pub fn vector(&self, s: &Series) -> (DVector<C64>, f64) {
        let mut v = DVector::zeros(self.len());
        let mut outside: f64 = 0.0;
        for t in s.terms() {
            match self.pos(t.mono) {
                Some(i) => v[i] += t.c,
                None => outside = outside.max(t.c.norm()),
            }
        }
        (v, outside)
    }

    pub fn series(&self, space: Space, trunc: i32, v: &DVector<C64>) -> Series {
        Series::from_terms(space, trunc, self.monos.iter().zip(v.iter()).map(|(m, c)| (*m, *c)))
    }
}

/// Matrix of a linear operator between two monomial bases.
pub fn op_matrix<F: Fn(&Series) -> Series>(space: Space, trunc: i32, dom: &Basis, cod: &Basis, op: F) -> CMatrix {
    let mut a = CMatrix::zeros(cod.len(), dom.len());
    for (j, m) in dom.monos.iter().enumerate() {
        let img = op(&Series::from_terms(space, trunc, [(*m, C64::new(1.0, 0.0))]));
        let (v, outside) = cod.vector(&img);
        debug_assert!(outside < 1e-12, "operator image leaves the codomain basis");
        a.set_column(j, &v);
    }
    a
}

/// Apply the differential operator `pbar(nabla, nablab)`: every monomial
/// `c z^a zb^b` of `p` acts as `conj(c) d^a/dz^a d^b/dzb^b`. Variables beyond
/// the `z, zb` blocks are left alone.
pub fn conj_poly_diff(p: &Series, h: &Series) -> Series {
    let sp = h.space();
    let (_, _, len) = sp.type_blocks().expect("type blocks");
    let mut acc = Series::zero(sp, h.trunc());
    for t in p.terms() {
        let mut d = h.clone();
        for v in 0..2 * len {
            for _ in 0..t.mono.exp(v) {
                d = d.deriv(v);
            }
        }
        acc = &acc.truncated(d.trunc()) + &d.scale(t.c.conj());
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_counts() {
        assert_eq!(compositions(3, 2).len(), 6);
        assert_eq!(compositions(1, 4), vec![vec![4]]);
        assert_eq!(compositions(2, 1), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(type_monomials(2, 2, 1, 0).len(), 6);
    }
}
