//! Formal holomorphic maps `(z, w) -> (f(z, w), g(z, w))` and their action
//! on hypersurfaces.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypersurface::Hypersurface;
use crate::linalg::CMatrix;
use crate::series::{c64, Mono, Series, SeriesJson, Space, C64};

/// Truncated holomorphic map. `f` has `n` components, all series live in
/// `Space::Holo(n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalMap {
    pub f: Vec<Series>,
    pub g: Series,
}

/// JSON layout `{"f": [series...], "g": series}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormalMapJson {
    pub f: Vec<SeriesJson>,
    pub g: SeriesJson,
}

impl FormalMap {
    pub fn identity(n: usize, trunc: i32) -> FormalMap {
        let sp = Space::Holo(n);
        FormalMap { f: (0..n).map(|i| Series::var(sp, trunc, i)).collect(), g: Series::var(sp, trunc, n) }
    }

    /// `z -> A z + b w`, `w -> c w`.
    pub fn linear(a: &CMatrix, b: &DVector<C64>, c: C64, trunc: i32) -> FormalMap {
        let n = a.nrows();
        let sp = Space::Holo(n);
        let f = (0..n)
            .map(|i| {
                let mut t: Vec<(Mono, C64)> = (0..n).map(|j| (Mono::var(j), a[(i, j)])).collect();
                t.push((Mono::var(n), b[i]));
                Series::from_terms(sp, trunc, t)
            })
            .collect();
        FormalMap { f, g: Series::from_terms(sp, trunc, [(Mono::var(n), c)]) }
    }

    pub fn from_components(mut comps: Vec<Series>) -> Result<FormalMap> {
        let g = comps.pop().ok_or_else(|| Error::Input("empty map".into()))?;
        let n = comps.len();
        if comps.iter().chain([&g]).any(|s| s.space() != Space::Holo(n)) {
            return Err(Error::SpaceMismatch(format!("map components must live in Holo({n})")));
        }
        Ok(FormalMap { f: comps, g })
    }

    pub fn n(&self) -> usize {
        self.f.len()
    }

    pub fn trunc(&self) -> i32 {
        self.f.iter().map(|s| s.trunc()).chain([self.g.trunc()]).min().unwrap()
    }

    pub fn components(&self) -> Vec<Series> {
        let mut c = self.f.clone();
        c.push(self.g.clone());
        c
    }

    pub fn truncated(&self, trunc: i32) -> FormalMap {
        FormalMap { f: self.f.iter().map(|s| s.truncated(trunc)).collect(), g: self.g.truncated(trunc) }
    }

    /// `(A, b, c)` of the linear part `z -> A z + b w`, `w -> c w`.
    pub fn linear_part(&self) -> (CMatrix, DVector<C64>, C64) {
        let n = self.n();
        let a = CMatrix::from_fn(n, n, |i, j| self.f[i].coeff(Mono::var(j)));
        let b = DVector::from_fn(n, |i, _| self.f[i].coeff(Mono::var(n)));
        (a, b, self.g.coeff(Mono::var(n)))
    }

    /// Checks the shape required for weighted composition: no constant
    /// terms, `g` without linear `z` terms, invertible linear part.
    pub fn check_admissible(&self) -> Result<()> {
        let n = self.n();
        for s in self.components() {
            if s.constant_term().norm() > 0.0 {
                return Err(Error::Input("map must fix the origin".into()));
            }
        }
        if (0..n).any(|j| self.g.coeff(Mono::var(j)).norm() > 1e-12) {
            return Err(Error::Input("w-component has linear z terms; the map does not respect the weights".into()));
        }
        let (a, _, c) = self.linear_part();
        if c.norm() < 1e-12 || a.clone().lu().determinant().norm() < 1e-12 {
            return Err(Error::Singular("linear part of the map is not invertible".into()));
        }
        Ok(())
    }

    /// `self(inner(z, w))`.
    pub fn compose(&self, inner: &FormalMap) -> Result<FormalMap> {
        let sp = Space::Holo(self.n());
        let imgs = inner.components();
        let comps = self.components().iter().map(|s| s.substitute(&imgs, sp)).collect::<Result<Vec<_>>>()?;
        FormalMap::from_components(comps)
    }

    /// Formal inverse by fixed-point iteration `S = Lin^{-1}(id - N(S))`,
    /// where `N` is the nonlinear part. Each round gains one ordinary degree.
    pub fn inverse(&self) -> Result<FormalMap> {
        self.check_admissible()?;
        let n = self.n();
        let trunc = self.trunc();
        let (a, b, c) = self.linear_part();
        let ainv = a.clone().try_inverse().ok_or_else(|| Error::Singular("linear part".into()))?;
        let lin = FormalMap::linear(&a, &b, c, trunc);
        let nonlin: Vec<Series> = self.components().iter().zip(lin.components()).map(|(s, l)| s - &l).collect();
        // Lin^{-1}(y) = (A^{-1}(y_z - b y_w / c), y_w / c)
        let lin_inv = FormalMap::linear(&ainv, &(-(&ainv * &b) / c), C64::new(1.0, 0.0) / c, trunc);
        let id = FormalMap::identity(n, trunc);
        let sp = Space::Holo(n);
        let mut s = lin_inv.clone();
        for _ in 0..=trunc + 1 {
            let imgs = s.components();
            let rhs: Vec<Series> = id
                .components()
                .iter()
                .zip(&nonlin)
                .map(|(y, nl)| Ok(y - &nl.substitute(&imgs, sp)?))
                .collect::<Result<_>>()?;
            let next = lin_inv.compose(&FormalMap::from_components(rhs)?)?;
            let done = next.dist(&s) == 0.0;
            s = next;
            if done {
                break;
            }
        }
        Ok(s)
    }

    /// Largest coefficient difference over all components.
    pub fn dist(&self, other: &FormalMap) -> f64 {
        self.components().iter().zip(other.components()).map(|(a, b)| a.dist(&b)).fold(0.0, f64::max)
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.dist(&FormalMap::identity(self.n(), self.trunc())) <= tol
    }

    pub fn to_json(&self) -> FormalMapJson {
        FormalMapJson { f: self.f.iter().map(|s| s.to_json()).collect(), g: self.g.to_json() }
    }

    pub fn from_json(j: &FormalMapJson) -> Result<FormalMap> {
        let n = j.f.len();
        let mut comps = Vec::with_capacity(n + 1);
        for s in j.f.iter().chain([&j.g]) {
            if s.n != n {
                return Err(Error::Input("map components disagree on n".into()));
            }
            let x = Series::from_json(s)?;
            comps.push(if x.is_empty() { Series::zero(Space::Holo(n), s.trunc) } else { x });
        }
        FormalMap::from_components(comps)
    }
}

/// Image `T(M)` of a hypersurface: `p` lies on `T(M)` iff `rho(T^{-1}(p)) = 0`
/// with `rho = -im w + phi(z, zb, re w)`. The new graph is solved from the
/// real equation on `w = s + i t`.
pub fn apply_map(m: &Hypersurface, t: &FormalMap) -> Result<Hypersurface> {
    let n = m.n();
    if t.n() != n {
        return Err(Error::SpaceMismatch(format!("map has n = {}, hypersurface n = {n}", t.n())));
    }
    let trunc = m.trunc().min(t.trunc());
    let inv = t.truncated(trunc).inverse()?;
    let sl = Space::Slice(n);
    let (s_var, t_var) = (2 * n, 2 * n + 1);
    // holomorphic components evaluated at w = s + i t
    let w = &Series::var(sl, trunc, s_var) + &Series::var(sl, trunc, t_var).scale(c64(0.0, 1.0));
    let mut hol_imgs: Vec<Series> = (0..n).map(|i| Series::var(sl, trunc, i)).collect();
    hol_imgs.push(w);
    let h: Vec<Series> = inv.components().iter().map(|s| s.substitute(&hol_imgs, sl)).collect::<Result<_>>()?;
    let hw = &h[n];
    let hw_bar = hw.conj();
    let mut phi_imgs: Vec<Series> = h[..n].to_vec();
    phi_imgs.extend(h[..n].iter().map(|s| s.conj()));
    phi_imgs.push((hw + &hw_bar).scale_re(0.5));
    // rho = -(hw - hwb)/(2i) + phi(...)
    let rho = &(hw - &hw_bar).scale(c64(0.0, 0.5)) + &m.phi().truncated(trunc).substitute(&phi_imgs, sl)?;
    let a = rho.coeff(Mono::var(t_var));
    if a.norm() < 1e-12 {
        return Err(Error::Singular(format!("transformed equation does not determine im w (dt coefficient {a})")));
    }
    let rest = rho.filter(|x| x.mono != Mono::var(t_var));
    let ms = Space::Mixed(n);
    let mut imgs: Vec<Series> = (0..2 * n + 1).map(|i| Series::var(ms, trunc, i)).collect();
    let mut tt = Series::zero(ms, trunc);
    for _ in 0..=trunc {
        imgs.push(tt.clone());
        let next = rest.substitute(&imgs, ms)?.scale(-C64::new(1.0, 0.0) / a);
        imgs.pop();
        let done = next.dist(&tt) == 0.0;
        tt = next;
        if done {
            break;
        }
    }
    Hypersurface::new(tt)
}
