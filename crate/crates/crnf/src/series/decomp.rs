use std::collections::BTreeMap;

use super::{Mono, Series, Term};

impl Series {
    /// Bidegree `(|a|, |b|)` of a monomial in the `z` and `zb` blocks.
    pub fn type_of(&self, m: Mono) -> (u32, u32) {
        let (z0, zb0, len) = self.space().type_blocks().expect("space has no type bidegree");
        (m.block_sum(z0, len), m.block_sum(zb0, len))
    }

    /// Split into components of type `(k, l)`.
    pub fn type_decompose(&self) -> BTreeMap<(u32, u32), Series> {
        let mut parts: BTreeMap<(u32, u32), Vec<Term>> = BTreeMap::new();
        for t in self.terms() {
            parts.entry(self.type_of(t.mono)).or_default().push(*t);
        }
        parts.into_iter().map(|(k, v)| (k, Series::from_sorted(self.space(), self.trunc(), v))).collect()
    }

    pub fn type_component(&self, k: u32, l: u32) -> Series {
        self.filter(|t| self.type_of(t.mono) == (k, l))
    }

    /// Split into weighted homogeneous components.
    pub fn weighted_decompose(&self) -> BTreeMap<u32, Series> {
        let mut parts: BTreeMap<u32, Vec<Term>> = BTreeMap::new();
        for t in self.terms() {
            parts.entry(t.deg).or_default().push(*t);
        }
        parts.into_iter().map(|(k, v)| (k, Series::from_sorted(self.space(), self.trunc(), v))).collect()
    }

    /// Pure terms: type `(k, 0)` or `(0, l)` (constants included).
    pub fn pure_part(&self) -> Series {
        self.filter(|t| {
            let (k, l) = self.type_of(t.mono);
            k == 0 || l == 0
        })
    }
}
