use super::{Mono, Series, Space, C64};
use crate::error::{Error, Result};

struct Subst<'a> {
    space: Space,
    images: &'a [Series],
    vals: Vec<u32>,
    pows: Vec<Vec<Series>>,
    trunc: i32,
    nv: usize,
}

impl<'a> Subst<'a> {
    fn pow(&mut self, i: usize, e: u32) -> &Series {
        let e = e as usize;
        if self.pows[i].is_empty() {
            self.pows[i].push(Series::one(self.space, self.trunc));
        }
        while self.pows[i].len() <= e {
            let next = self.pows[i].last().unwrap().mul_trunc(&self.images[i], self.trunc);
            self.pows[i].push(next);
        }
        &self.pows[i][e]
    }

    /// Terms share their exponents on variables `< i`; `lb` bounds the
    /// weighted degree already committed by those variables.
    fn rec(&mut self, terms: &[(Mono, C64)], i: usize, lb: i32) -> Series {
        let limit = self.trunc - lb;
        let mut i = i;
        while i < self.nv && terms.iter().all(|t| t.0.exp(i) == 0) {
            i += 1;
        }
        if i == self.nv {
            let c: C64 = terms.iter().map(|t| t.1).sum();
            return Series::constant(self.space, limit.max(0), c);
        }
        // results are valid through `limit`, relative to the committed `lb`
        let mut acc = Series::zero(self.space, limit);
        let mut start = 0;
        while start < terms.len() {
            let e = terms[start].0.exp(i);
            let mut end = start + 1;
            while end < terms.len() && terms[end].0.exp(i) == e {
                end += 1;
            }
            let step = (e * self.vals[i]) as i32;
            if step <= limit {
                let sub = self.rec(&terms[start..end], i + 1, lb + step);
                // pow has valuation >= step, so the product is good through `limit`
                let part = if e == 0 { sub } else { self.pow(i, e).mul_raw(&sub, limit) };
                acc = &acc + &part;
            }
            start = end;
        }
        acc
    }
}

impl Series {
    /// Composition `self(images)`. `images[i]` replaces variable `i` and all
    /// images live in `space`. Each image must vanish to at least the weight
    /// of the variable it replaces; the result is then correct through
    /// `min(self.trunc, image truncs)`.
    pub fn substitute(&self, images: &[Series], space: Space) -> Result<Series> {
        self.substitute_with(images, space, false)
    }

    /// As [`Series::substitute`]. With `allow_low`, images of lower valuation
    /// (including constant terms) are accepted and `self` is treated as an
    /// exact polynomial, so the result truncation is the images' minimum.
    pub fn substitute_with(&self, images: &[Series], space: Space, allow_low: bool) -> Result<Series> {
        let nv = self.space.nvars();
        if images.len() != nv {
            return Err(Error::SpaceMismatch(format!("expected {nv} images, got {}", images.len())));
        }
        let mut trunc = if allow_low { i32::MAX } else { self.trunc };
        let mut vals = vec![0u32; nv];
        for i in 0..nv {
            if !self.terms.iter().any(|t| t.mono.exp(i) > 0) {
                continue;
            }
            let im = &images[i];
            if im.space() != space {
                return Err(Error::SpaceMismatch(format!("image {i} lives in {:?}, expected {space:?}", im.space())));
            }
            trunc = trunc.min(im.trunc());
            let v = im.valuation(0.0).unwrap_or(im.trunc().max(0) as u32 + 1);
            let w = self.space.weight(i);
            if v < w && !allow_low {
                return Err(Error::Input(format!(
                    "image of {} has weighted valuation {v} below the variable weight {w}",
                    self.space.var_name(i)
                )));
            }
            vals[i] = v;
        }
        if trunc == i32::MAX {
            trunc = self.trunc;
        }
        let mut terms: Vec<(Mono, C64)> = self.terms.iter().map(|t| (t.mono, t.c)).collect();
        terms.sort_unstable_by_key(|t| t.0);
        let mut ctx = Subst { space, images, vals, pows: vec![Vec::new(); nv], trunc, nv };
        if terms.is_empty() {
            return Ok(Series::zero(space, trunc));
        }
        let out = ctx.rec(&terms, 0, 0);
        Ok(out.truncated(trunc))
    }

    /// Replace a single variable, keeping the others.
    pub fn subst_var(&self, var: usize, image: &Series) -> Result<Series> {
        let sp = self.space;
        let tr = self.trunc.max(image.trunc());
        let images: Vec<Series> =
            (0..sp.nvars()).map(|i| if i == var { image.clone() } else { Series::var(sp, tr, i) }).collect();
        self.substitute(&images, sp)
    }
}
