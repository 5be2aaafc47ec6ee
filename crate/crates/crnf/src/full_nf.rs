//! Complete formal normal form at a generic Levi degeneracy: the
//! normalization parameters `P`, the graded solver for `L` on the group
//! `G0` modulo the normal space, and the degree-by-degree driver.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DVector, Dyn, LU};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::coeff::holo_monomials;
use crate::error::{Error, Result};
use crate::hypersurface::{bracket, p_r, Hypersurface};
use crate::linalg::{i_rs, CMatrix, RMatrix};
use crate::map::{apply_map, FormalMap, FormalMapJson};
use crate::normal_space::{NormalSpace, RealCoords};
use crate::partial_nf::{levi_matrix, matrix_from_json, matrix_to_json, MatrixJson};
use crate::series::{c64, Mono, Series, SeriesJson, Space, C64};

const TOL: f64 = 1e-9;

/// Normalization parameters. The map is
///
/// ```text
/// z'  -> A z' + w B + (2i/c) <A z', Bb> A z' + q'
/// z^n -> c^{1/3} z^n + q^n
/// w   -> c w + 2i <A z', Bb> w
/// ```
///
/// with `q^b = sum a^b_J z^J + (sum_{a<b} b^b_a (Az')^a + c^b (Az')^b) w`,
/// `c^b` real, and `q^n = sum d_I z^I`. Here `<u, v> = sum eps_j u_j v_j`
/// with the signature of the Levi form.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizationP {
    pub c: f64,
    pub a: CMatrix,
    pub b: DVector<C64>,
    /// `sum_J a^b_J z^J` for each primed `b`: holomorphic, cubic in `z`.
    pub cubic: Vec<Series>,
    /// `b^b_a` at `(b, a)`, strictly lower triangular.
    pub bw: CMatrix,
    /// `c^b`.
    pub cw: Vec<f64>,
    /// `sum d_I z^I`: holomorphic, quadratic in `z`.
    pub quad_n: Series,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationPJson {
    pub c: f64,
    #[serde(rename = "A")]
    pub a: MatrixJson,
    #[serde(rename = "B")]
    pub b: Vec<[f64; 2]>,
    pub cubic: Vec<SeriesJson>,
    pub bw: MatrixJson,
    pub cw: Vec<f64>,
    pub quad_n: SeriesJson,
}

impl NormalizationP {
    pub fn identity(n: usize) -> NormalizationP {
        let m = n - 1;
        let sp = Space::Holo(n);
        NormalizationP {
            c: 1.0,
            a: CMatrix::identity(m, m),
            b: DVector::zeros(m),
            cubic: vec![Series::zero(sp, 3); m],
            bw: CMatrix::zeros(m, m),
            cw: vec![0.0; m],
            quad_n: Series::zero(sp, 2),
        }
    }

    /// Only `c`, `A`, `B`; the higher coefficients vanish.
    pub fn linear(c: f64, a: CMatrix, b: DVector<C64>) -> NormalizationP {
        let mut p = NormalizationP::identity(a.nrows() + 1);
        p.c = c;
        p.a = a;
        p.b = b;
        p
    }

    pub fn n(&self) -> usize {
        self.a.nrows() + 1
    }

    /// The holomorphic map; `r` fixes the signature of the Levi form.
    pub fn to_map(&self, r: usize, trunc: i32) -> FormalMap {
        let n = self.n();
        let m = n - 1;
        let sp = Space::Holo(n);
        let z = |i| Series::var(sp, trunc, i);
        let w = Series::var(sp, trunc, n);
        let az: Vec<Series> =
            (0..m).map(|i| (0..m).fold(Series::zero(sp, trunc), |acc, j| &acc + &z(j).scale(self.a[(i, j)]))).collect();
        let eps = |j: usize| if j < r { 1.0 } else { -1.0 };
        let azb = (0..m).fold(Series::zero(sp, trunc), |acc, j| &acc + &az[j].scale(self.b[j].conj() * eps(j)));
        let mut f: Vec<Series> = Vec::with_capacity(n);
        for be in 0..m {
            let mut q = self.cubic[be].with_trunc(trunc);
            let mut lin = az[be].scale_re(self.cw[be]);
            for al in 0..be {
                lin = &lin + &az[al].scale(self.bw[(be, al)]);
            }
            q = &q + &(&lin * &w);
            let main = &(&az[be] + &w.scale(self.b[be])) + &(&azb * &az[be]).scale(c64(0.0, 2.0 / self.c));
            f.push(&main + &q);
        }
        f.push(&z(m).scale_re(self.c.cbrt()) + &self.quad_n.with_trunc(trunc));
        let g = &w.scale_re(self.c) + &(&azb * &w).scale(c64(0.0, 2.0));
        FormalMap { f, g }
    }

    pub fn to_json(&self) -> NormalizationPJson {
        NormalizationPJson {
            c: self.c,
            a: matrix_to_json(&self.a),
            b: self.b.iter().map(|x| [x.re, x.im]).collect(),
            cubic: self.cubic.iter().map(|s| s.to_json()).collect(),
            bw: matrix_to_json(&self.bw),
            cw: self.cw.clone(),
            quad_n: self.quad_n.to_json(),
        }
    }

    pub fn from_json(j: &NormalizationPJson) -> Result<NormalizationP> {
        let a = matrix_from_json(&j.a)?;
        let m = a.nrows();
        let sp = Space::Holo(m + 1);
        let load = |s: &SeriesJson, tr: i32| -> Result<Series> {
            let x = Series::from_json(s)?;
            if x.is_empty() {
                return Ok(Series::zero(sp, tr));
            }
            if x.space() != sp {
                return Err(Error::SpaceMismatch("normalization series must be holomorphic in n variables".into()));
            }
            Ok(x)
        };
        if j.b.len() != m || j.cubic.len() != m || j.cw.len() != m {
            return Err(Error::Input("normalization parameters disagree on n".into()));
        }
        Ok(NormalizationP {
            c: j.c,
            a,
            b: DVector::from_iterator(m, j.b.iter().map(|x| c64(x[0], x[1]))),
            cubic: j.cubic.iter().map(|s| load(s, 3)).collect::<Result<_>>()?,
            bw: matrix_from_json(&j.bw)?,
            cw: j.cw.clone(),
            quad_n: load(&j.quad_n, 2)?,
        })
    }
}

/// Checks the group conditions on `(c, A)`, the shape of the higher
/// coefficients, and that the map keeps the model through weighted degree 3.
pub fn validate_p(p: &NormalizationP, r: usize, rmat: &CMatrix) -> bool {
    let n = p.n();
    let m = n - 1;
    if rmat.nrows() != m || r > m || p.b.len() != m || p.cubic.len() != m || p.cw.len() != m {
        return false;
    }
    if p.bw.shape() != (m, m) || !p.c.is_finite() || p.c.abs() < 1e-12 {
        return false;
    }
    let irs = i_rs(r, m - r);
    if (p.a.adjoint() * &irs * &p.a - irs.scale(p.c)).norm() > TOL * (1.0 + p.c.abs()) {
        return false;
    }
    let dn = p.c.cbrt();
    if (dn * dn * dn / p.c - 1.0).abs() > TOL {
        return false;
    }
    if ((p.a.transpose() * rmat * &p.a).scale(dn / p.c) - rmat).norm() > TOL * (1.0 + rmat.norm()) {
        return false;
    }
    if (0..m).any(|i| (i..m).any(|j| p.bw[(i, j)].norm() > 0.0)) {
        return false;
    }
    let z_only = |s: &Series, d: u32| s.terms().iter().all(|t| t.mono.exp(n) == 0 && t.deg == d);
    if !p.cubic.iter().all(|s| s.space() == Space::Holo(n) && z_only(s, 3)) {
        return false;
    }
    if p.quad_n.space() != Space::Holo(n) || !z_only(&p.quad_n, 2) {
        return false;
    }
    // the relation between the quadratic and cubic terms: the model is kept
    let model = Hypersurface::model(r, rmat, 3);
    match apply_map(&model, &p.to_map(r, 3)) {
        Ok(img) => img.phi().dist(model.phi()) <= 1e-8 * (1.0 + p.b.norm()).powi(3) * (1.0 + p.c.abs()),
        Err(_) => false,
    }
}

/// Reads `(r, R)` off a hypersurface in the form
/// `im w = <z', zb'> + 2 Re(zb^n p_R(z)) + O(4)`.
pub fn model_data(m: &Hypersurface) -> Result<(usize, CMatrix)> {
    let n = m.n();
    if n < 2 {
        return Err(Error::NotApplicable("need n >= 2".into()));
    }
    let g = levi_matrix(m);
    let mut r = 0;
    while r < n - 1 && (g[(r, r)] - c64(1.0, 0.0)).norm() < TOL {
        r += 1;
    }
    // R from the coefficient of zb^n z^a z^b
    let rmat = CMatrix::from_fn(n - 1, n - 1, |a, b| {
        let mut e = vec![0u32; 2 * n + 1];
        e[a] += 1;
        e[b] += 1;
        e[2 * n - 1] += 1;
        let c = m.phi().coeff_of(&e);
        if a == b {
            c
        } else {
            c * 0.5
        }
    });
    let model = Hypersurface::model(r, &rmat, 3);
    if m.phi().truncated(3).dist(model.phi()) > 1e-8 {
        return Err(Error::NotApplicable(
            "hypersurface is not of the form <z', zb'> + 2 Re(zb^n p_R(z)) + O(4); run the partial normal form first"
                .into(),
        ));
    }
    Ok((r, rmat))
}

/// Which component of `(f, g)` an unknown belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Comp {
    F(usize),
    G,
}

#[derive(Clone, Copy, Debug)]
struct Unknown {
    comp: Comp,
    mono: Mono,
    c: C64,
}

/// The real unknowns of `G0` at weighted degree `nu`.
fn g0_unknowns(n: usize, nu: u32) -> Vec<Unknown> {
    let mut out = Vec::new();
    let both = [c64(1.0, 0.0), c64(0.0, 1.0)];
    let push = |out: &mut Vec<Unknown>, comp, mono, cs: &[C64]| {
        for &c in cs {
            out.push(Unknown { comp, mono, c });
        }
    };
    let wexp = |mono: Mono| mono.exp(n);
    let zdeg = |mono: Mono| mono.block_sum(0, n);
    for be in 0..n - 1 {
        for mono in weighted_holo(n, nu - 1) {
            match (wexp(mono), zdeg(mono)) {
                (0, 3) => {}
                (1, 1) => {
                    let al = (0..n).find(|&j| mono.exp(j) == 1).unwrap();
                    if al < be {
                    } else if al == be {
                        push(&mut out, Comp::F(be), mono, &both[1..]);
                    } else {
                        push(&mut out, Comp::F(be), mono, &both);
                    }
                }
                _ => push(&mut out, Comp::F(be), mono, &both),
            }
        }
    }
    for mono in weighted_holo(n, nu - 2) {
        if !(wexp(mono) == 0 && zdeg(mono) == 2) {
            push(&mut out, Comp::F(n - 1), mono, &both);
        }
    }
    for mono in weighted_holo(n, nu) {
        push(&mut out, Comp::G, mono, &both);
    }
    out
}

fn weighted_holo(n: usize, nu: u32) -> Vec<Mono> {
    (0..=nu / 2).flat_map(|m| holo_monomials(n, nu - 2 * m, m)).collect()
}

/// Random element `(z + f, w + g)` of `G0` with components through weighted
/// degree `top` and coefficients of size `scale`.
pub fn random_g0<R: Rng>(n: usize, top: u32, trunc: i32, scale: f64, rng: &mut R) -> FormalMap {
    let mut t = FormalMap::identity(n, trunc);
    if scale == 0.0 {
        return t;
    }
    let hs = Space::Holo(n);
    for nu in 4..=top {
        for u in g0_unknowns(n, nu) {
            let s = Series::from_terms(hs, trunc, [(u.mono, u.c * (scale * rng.gen_range(-1.0..1.0)))]);
            match u.comp {
                Comp::F(i) => t.f[i] = &t.f[i] + &s,
                Comp::G => t.g = &t.g + &s,
            }
        }
    }
    t
}

/// Assembled square system at one weighted degree.
pub struct DegreeSystem {
    pub nu: u32,
    pub coords: RealCoords,
    unknowns: Vec<Unknown>,
    nbasis: RMatrix,
    lu: LU<f64, Dyn, Dyn>,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

/// Solution of `L(f', f^n, g) + N = F` at one degree.
#[derive(Clone, Debug)]
pub struct DegreeSolution {
    /// `f` components (holomorphic, `n` entries) and `g`.
    pub f: Vec<Series>,
    pub g: Series,
    pub normal: Series,
    /// `max |L(x) + N - F|` over the coordinates.
    pub residual: f64,
}

impl DegreeSystem {
    pub fn dim(&self) -> usize {
        self.coords.dim()
    }

    pub fn g0_dim(&self) -> usize {
        self.unknowns.len()
    }

    pub fn normal_dim(&self) -> usize {
        self.nbasis.ncols()
    }
}

/// `L(f', f^n, g) = Re(i g + 2<f', zb'> + 2(pb_R + 2 z^n zb^n) f^n)` at
/// `w = s + i<z', zb'>`.
pub struct LOperator {
    pub n: usize,
    pub r: usize,
    bracket: Series,
    pbar: Series,
}

impl LOperator {
    pub fn new(r: usize, rmat: &CMatrix, trunc: i32) -> LOperator {
        let n = rmat.nrows() + 1;
        let sp = Space::Mixed(n);
        let zn = Series::var(sp, trunc, n - 1);
        let zbn = Series::var(sp, trunc, 2 * n - 1);
        let pbar = &p_r(rmat, trunc).conj() + &(&zn * &zbn).scale_re(2.0);
        LOperator { n, r, bracket: bracket(n, r, trunc), pbar }
    }

    fn at_model(&self, h: &Series, trunc: i32) -> Result<Series> {
        let n = self.n;
        let sp = Space::Mixed(n);
        let mut imgs: Vec<Series> = (0..n).map(|i| Series::var(sp, trunc, i)).collect();
        imgs.push(&Series::var(sp, trunc, 2 * n) + &self.bracket.with_trunc(trunc).scale(c64(0.0, 1.0)));
        h.substitute(&imgs, sp)
    }

    /// Image of `(f, g)`; `f` has `n` holomorphic components.
    pub fn apply(&self, f: &[Series], g: &Series, trunc: i32) -> Result<Series> {
        let n = self.n;
        let sp = Space::Mixed(n);
        let mut y = self.at_model(g, trunc)?.scale(c64(0.0, 1.0));
        for be in 0..n - 1 {
            let e = if be < self.r { 2.0 } else { -2.0 };
            let t = &self.at_model(&f[be], trunc)? * &Series::var(sp, trunc, n + be);
            y = &y + &t.scale_re(e);
        }
        y = &y + &(&self.at_model(&f[n - 1], trunc)? * &self.pbar.with_trunc(trunc)).scale_re(2.0);
        Ok(y.real_part())
    }
}

type Key = (usize, usize, Vec<u64>, u32);

fn cache() -> &'static Mutex<HashMap<Key, Arc<DegreeSystem>>> {
    static C: OnceLock<Mutex<HashMap<Key, Arc<DegreeSystem>>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The square system at degree `nu` for `(r, R)`; assembled once and cached.
pub fn degree_system(r: usize, rmat: &CMatrix, nu: u32) -> Result<Arc<DegreeSystem>> {
    if nu < 4 {
        return Err(Error::Input(format!("weighted degree {nu} < 4")));
    }
    let n = rmat.nrows() + 1;
    let key: Key = (n, r, rmat.iter().flat_map(|x| [x.re.to_bits(), x.im.to_bits()]).collect(), nu);
    if let Some(s) = cache().lock().unwrap().get(&key) {
        return Ok(s.clone());
    }
    let sys = Arc::new(assemble(r, rmat, nu)?);
    cache().lock().unwrap().insert(key, sys.clone());
    Ok(sys)
}

fn assemble(r: usize, rmat: &CMatrix, nu: u32) -> Result<DegreeSystem> {
    let n = rmat.nrows() + 1;
    let tr = nu as i32;
    let coords = RealCoords::new(n, nu);
    let unknowns = g0_unknowns(n, nu);
    let nbasis = NormalSpace::new(r, rmat)?.real_basis(&coords);
    let dim = coords.dim();
    if unknowns.len() + nbasis.ncols() != dim {
        return Err(Error::Singular(format!(
            "degree {nu}: {} unknowns in G0 plus {} normal directions for {dim} equations",
            unknowns.len(),
            nbasis.ncols()
        )));
    }
    let lop = LOperator::new(r, rmat, tr);
    let mut a = RMatrix::zeros(dim, dim);
    for (j, u) in unknowns.iter().enumerate() {
        let (f, g) = unknown_series(n, u, tr);
        let img = lop.apply(&f, &g, tr)?;
        a.set_column(j, &coords.vector(&img));
    }
    a.view_mut((0, unknowns.len()), (dim, nbasis.ncols())).copy_from(&nbasis);
    let sv = crate::linalg::singular_values_real(&a);
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let sigma_min = sv.last().copied().unwrap_or(0.0);
    if !(sigma_min > 1e-10 * sigma_max) {
        return Err(Error::Singular(format!("degree {nu}: smallest singular value {sigma_min:e} of {sigma_max:e}")));
    }
    Ok(DegreeSystem { nu, coords, unknowns, nbasis, lu: a.lu(), sigma_min, sigma_max })
}

fn unknown_series(n: usize, u: &Unknown, trunc: i32) -> (Vec<Series>, Series) {
    let hs = Space::Holo(n);
    let mut f = vec![Series::zero(hs, trunc); n];
    let mut g = Series::zero(hs, trunc);
    let s = Series::from_terms(hs, trunc, [(u.mono, u.c)]);
    match u.comp {
        Comp::F(i) => f[i] = s,
        Comp::G => g = s,
    }
    (f, g)
}

/// Solves `L(f', f^n, g) + N = F` at weighted degree `nu` with `(f, g)`
/// under the `G0` constraints and `N` in the normal space.
pub fn solve_l(fbar: &Series, nu: u32, r: usize, rmat: &CMatrix) -> Result<DegreeSolution> {
    let n = rmat.nrows() + 1;
    if fbar.space() != Space::Mixed(n) {
        return Err(Error::SpaceMismatch("right-hand side must be a mixed series in n variables".into()));
    }
    if !fbar.is_real(TOL * (1.0 + fbar.max_abs())) {
        return Err(Error::NonReal);
    }
    let sys = degree_system(r, rmat, nu)?;
    solve_with(&sys, fbar, r, rmat)
}

fn solve_with(sys: &DegreeSystem, fbar: &Series, r: usize, rmat: &CMatrix) -> Result<DegreeSolution> {
    let n = rmat.nrows() + 1;
    let tr = sys.nu as i32;
    let rhs = sys.coords.vector(fbar);
    let x = sys.lu.solve(&rhs).ok_or_else(|| Error::Singular(format!("degree {}", sys.nu)))?;
    let hs = Space::Holo(n);
    let mut fterms: Vec<Vec<(Mono, C64)>> = vec![Vec::new(); n];
    let mut gterms = Vec::new();
    for (u, &xi) in sys.unknowns.iter().zip(x.iter()) {
        let t = (u.mono, u.c * xi);
        match u.comp {
            Comp::F(i) => fterms[i].push(t),
            Comp::G => gterms.push(t),
        }
    }
    let f: Vec<Series> = fterms.into_iter().map(|t| Series::from_terms(hs, tr, t)).collect();
    let g = Series::from_terms(hs, tr, gterms);
    let k = sys.unknowns.len();
    let nv = &sys.nbasis * x.rows(k, sys.nbasis.ncols());
    let normal = sys.coords.series(&nv, tr);
    let lx = LOperator::new(r, rmat, tr).apply(&f, &g, tr)?;
    let residual = (&(&lx + &normal) - &fbar.homogeneous(sys.nu).with_trunc(tr)).max_abs();
    Ok(DegreeSolution { f, g, normal, residual })
}

/// Tests the `G0` conditions on `T = (z + f, w + g)`: identity linear part,
/// `f' = O(3)`, `f^n = O(2)`, `g = O(4)` in weighted degree, and vanishing of
/// the normalized constants: cubic `z` terms of `f'`, quadratic `z` terms of
/// `f^n`, `z^a w` in `f^b` for `a < b`, and the real part of `z^b w` in `f^b`.
pub fn check_g0(t: &FormalMap) -> bool {
    let n = t.n();
    if n < 2 {
        return false;
    }
    let id = FormalMap::identity(n, t.trunc());
    let d: Vec<Series> = t.components().iter().zip(id.components()).map(|(a, b)| a - &b).collect();
    let low = |s: &Series, w: u32| s.terms().iter().all(|x| x.deg >= w || x.c.norm() <= TOL);
    if !(0..n - 1).all(|b| low(&d[b], 3)) || !low(&d[n - 1], 2) || !low(&d[n], 4) {
        return false;
    }
    let small = |c: f64| c.abs() <= TOL;
    for be in 0..n - 1 {
        for x in d[be].terms() {
            let w = x.mono.exp(n);
            let zd = x.mono.block_sum(0, n);
            if w == 0 && zd == 3 && !small(x.c.norm()) {
                return false;
            }
            if w == 1 && zd == 1 {
                let al = (0..n).find(|&j| x.mono.exp(j) == 1).unwrap();
                if (al < be && !small(x.c.norm())) || (al == be && !small(x.c.re)) {
                    return false;
                }
            }
        }
    }
    d[n - 1].terms().iter().all(|x| !(x.mono.exp(n) == 0 && x.deg == 2) || small(x.c.norm()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeDiagnostics {
    pub nu: u32,
    pub dim: usize,
    pub sigma_min: f64,
    /// Largest coefficient of the degree-`nu` part outside `N` after the
    /// step, together with the linear residual of the solve.
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct NormalFormResult {
    /// `F` of the output in the normal space, weighted degrees `4..=degree`.
    pub normal: Series,
    /// The map in `G0` applied after `P`.
    pub t: FormalMap,
    pub p_used: NormalizationP,
    pub r: usize,
    pub rmat: CMatrix,
    pub degree: u32,
    pub diagnostics: Vec<DegreeDiagnostics>,
    /// `T(P(M))`.
    pub m_out: Hypersurface,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsJson {
    pub per_degree: Vec<DegreeDiagnostics>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalFormJson {
    #[serde(rename = "N")]
    pub n: SeriesJson,
    #[serde(rename = "T")]
    pub t: FormalMapJson,
    pub diagnostics: DiagnosticsJson,
}

impl NormalFormResult {
    pub fn to_json(&self) -> NormalFormJson {
        NormalFormJson {
            n: self.normal.to_json(),
            t: self.t.to_json(),
            diagnostics: DiagnosticsJson { per_degree: self.diagnostics.clone() },
        }
    }

    /// Largest singular value ratio over all degrees.
    pub fn worst_margin(&self) -> f64 {
        self.diagnostics.iter().map(|d| d.sigma_min).fold(f64::INFINITY, f64::min)
    }
}

/// Normal form through weighted degree `degree`: applies `P`, then solves
/// and applies `T_nu` for `nu = 4..=degree`. The map is `T o P` with
/// `T = T_degree o ... o T_4`.
pub fn normal_form(m: &Hypersurface, p: &NormalizationP, degree: u32) -> Result<NormalFormResult> {
    let (r, rmat) = model_data(m)?;
    let n = m.n();
    if p.n() != n {
        return Err(Error::Input(format!("normalization has n = {}, hypersurface n = {n}", p.n())));
    }
    if !validate_p(p, r, &rmat) {
        return Err(Error::Input("normalization parameters violate the group conditions".into()));
    }
    if degree as i32 > m.trunc() {
        return Err(Error::Truncation(format!("degree {degree} exceeds the truncation {}", m.trunc())));
    }
    let trunc = m.trunc();
    let mut cur = apply_map(m, &p.to_map(r, trunc))?;
    let mut t = FormalMap::identity(n, trunc);
    let mut diags = Vec::new();
    let mut normal = Series::zero(Space::Mixed(n), trunc);
    for nu in 4..=degree {
        let sys = degree_system(r, &rmat, nu)?;
        let sol = solve_with(&sys, &cur.phi().homogeneous(nu), r, &rmat)?;
        let hs = Space::Holo(n);
        let mut comps: Vec<Series> = (0..n).map(|i| &Series::var(hs, trunc, i) + &sol.f[i].with_trunc(trunc)).collect();
        comps.push(&Series::var(hs, trunc, n) + &sol.g.with_trunc(trunc));
        let step = FormalMap::from_components(comps)?;
        cur = apply_map(&cur, &step)?;
        t = step.compose(&t)?;
        let after = cur.phi().homogeneous(nu);
        let off = (&after - &sol.normal.with_trunc(trunc)).max_abs();
        diags.push(DegreeDiagnostics {
            nu,
            dim: sys.dim(),
            sigma_min: sys.sigma_min / sys.sigma_max,
            residual: off.max(sol.residual),
        });
        normal = &normal + &after;
    }
    Ok(NormalFormResult { normal, t, p_used: p.clone(), r, rmat, degree, diagnostics: diags, m_out: cur })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_counts() {
        let want = [(2, 4, 23), (2, 5, 54), (2, 6, 74), (2, 7, 96), (2, 8, 122), (3, 4, 54), (3, 5, 182)];
        for (n, nu, k) in want {
            assert_eq!(g0_unknowns(n, nu).len(), k, "n={n} nu={nu}");
        }
    }

    #[test]
    fn pure_term_is_removed_by_g() {
        let r0 = CMatrix::zeros(1, 1);
        let sp = Space::Mixed(2);
        let z4 = Series::monomial(sp, 4, &[4, 0, 0, 0, 0], c64(1.0, 0.0));
        let sol = solve_l(&(&z4 + &z4.conj()), 4, 1, &r0).unwrap();
        let want = Series::monomial(Space::Holo(2), 4, &[4, 0, 0], c64(0.0, -2.0));
        assert!(sol.g.dist(&want) < 1e-10);
        assert!(sol.f.iter().all(|s| s.max_abs() < 1e-10));
        assert!(sol.normal.max_abs() < 1e-10);
    }
}
