use serde::{Deserialize, Serialize};

use super::{c64, Mono, Series, Space};
use crate::error::{Error, Result};

/// One coefficient in the series JSON format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub z: Vec<u32>,
    pub zbar: Vec<u32>,
    pub s: u32,
    pub re: f64,
    pub im: f64,
}

/// Series JSON: `{"n", "trunc", "real", "terms"}`. Holomorphic series use the
/// same layout with an empty `zbar` and the power of `w` stored in `s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub n: usize,
    pub trunc: i32,
    pub real: bool,
    pub terms: Vec<TermJson>,
}

impl Series {
    pub fn to_json(&self) -> SeriesJson {
        let sp = self.space();
        let n = sp.n();
        let holo = match sp {
            Space::Mixed(_) => false,
            Space::Holo(_) => true,
            other => panic!("no JSON layout for {other:?}"),
        };
        let terms = self
            .terms()
            .iter()
            .map(|t| {
                let e = t.mono.exps(sp.nvars());
                if holo {
                    TermJson { z: e[..n].to_vec(), zbar: vec![], s: e[n], re: t.c.re, im: t.c.im }
                } else {
                    TermJson { z: e[..n].to_vec(), zbar: e[n..2 * n].to_vec(), s: e[2 * n], re: t.c.re, im: t.c.im }
                }
            })
            .collect();
        SeriesJson { n, trunc: self.trunc(), real: !holo && self.is_real(1e-12), terms }
    }

    pub fn from_json(j: &SeriesJson) -> Result<Series> {
        let n = j.n;
        let holo = !j.terms.is_empty() && j.terms.iter().all(|t| t.zbar.is_empty()) && n > 0;
        let sp = if holo { Space::Holo(n) } else { Space::Mixed(n) };
        let mut out = Vec::with_capacity(j.terms.len());
        for (k, t) in j.terms.iter().enumerate() {
            if t.z.len() != n || (!holo && t.zbar.len() != n) {
                return Err(Error::Input(format!("term {k}: exponent vectors must have length {n}")));
            }
            if !t.re.is_finite() || !t.im.is_finite() {
                return Err(Error::Input(format!("term {k}: non-finite coefficient")));
            }
            let mut e = t.z.clone();
            e.extend_from_slice(&t.zbar);
            e.push(t.s);
            let m = Mono::from_exps(&e);
            if m.degree(&sp) as i32 > j.trunc {
                return Err(Error::Input(format!("term {k}: weighted degree exceeds trunc {}", j.trunc)));
            }
            out.push((m, c64(t.re, t.im)));
        }
        let s = Series::from_terms(sp, j.trunc, out);
        if j.real && !s.is_real(1e-12) {
            return Err(Error::NonReal);
        }
        Ok(s)
    }
}
