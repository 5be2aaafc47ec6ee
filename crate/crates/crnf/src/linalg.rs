//! Dense complex linear algebra on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::series::{c64, C64};

pub type CMatrix = DMatrix<C64>;
pub type RMatrix = DMatrix<f64>;

/// Default tolerance for zero tests and rank decisions.
pub const EPS: f64 = 1e-9;

pub fn fro(a: &CMatrix) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn is_hermitian(a: &CMatrix, tol: f64) -> bool {
    a.is_square() && fro(&(a - a.adjoint())) <= tol * (1.0 + fro(a))
}

pub fn is_symmetric(a: &CMatrix, tol: f64) -> bool {
    a.is_square() && fro(&(a - a.transpose())) <= tol * (1.0 + fro(a))
}

pub fn from_real_diag(d: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&DVector::from_iterator(d.len(), d.iter().map(|&x| c64(x, 0.0))))
}

/// `I_{r,s}`: `r` ones followed by `s` minus ones.
pub fn i_rs(r: usize, s: usize) -> CMatrix {
    let d: Vec<f64> = (0..r + s).map(|i| if i < r { 1.0 } else { -1.0 }).collect();
    from_real_diag(&d)
}

/// Eigenvalues in descending order with unitary eigenvectors (columns).
pub fn hermitian_eig(a: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    if !is_hermitian(a, EPS) {
        return Err(Error::Input("matrix is not Hermitian".into()));
    }
    let m = a.nrows();
    if m == 0 {
        return Ok((vec![], CMatrix::zeros(0, 0)));
    }
    let h = (a + a.adjoint()).scale(0.5);
    let eig = to_faer(&h).self_adjoint_eigen(faer::Side::Lower).expect("eigen converges");
    let (sd, ev) = (eig.S(), eig.U());
    let mut idx: Vec<usize> = (0..m).collect();
    idx.sort_by(|&i, &j| sd[j].re.partial_cmp(&sd[i].re).unwrap());
    let vals = idx.iter().map(|&i| sd[i].re).collect();
    Ok((vals, CMatrix::from_fn(m, m, |i, j| ev[(i, idx[j])])))
}

/// Result of a Takagi factorization `U E U^T = D(lambda)`.
#[derive(Clone, Debug)]
pub struct TakagiResult {
    pub lambda: Vec<f64>,
    pub u: CMatrix,
}

/// Takagi factorization of a complex symmetric matrix.
///
/// The real-linear map `v -> E conj(v)` is represented by the real symmetric
/// matrix `[[A, B], [B, -A]]` (`E = A + iB`); its eigenvalues are `±lambda_j`,
/// and an eigenvector `(x, y)` for `+lambda` gives `v = x + iy` with
/// `E conj(v) = lambda v`. Vectors for distinct positive eigenvalues are
/// automatically orthonormal as complex vectors; the near-zero cluster is
/// orthonormalized explicitly.
pub fn takagi(e: &CMatrix) -> Result<TakagiResult> {
    if !is_symmetric(e, EPS) {
        return Err(Error::Input("matrix is not symmetric".into()));
    }
    let m = e.nrows();
    if m == 0 {
        return Ok(TakagiResult { lambda: vec![], u: CMatrix::zeros(0, 0) });
    }
    let es = (e + e.transpose()).scale(0.5);
    let mut big = RMatrix::zeros(2 * m, 2 * m);
    for i in 0..m {
        for j in 0..m {
            let z = es[(i, j)];
            big[(i, j)] = z.re;
            big[(i, j + m)] = z.im;
            big[(i + m, j)] = z.im;
            big[(i + m, j + m)] = -z.re;
        }
    }
    let (evals, evecs) = sym_eig_real(&big);
    let idx: Vec<usize> = (0..2 * m).collect();
    let scale = 1.0 + fro(&es);
    let cut = 1e-11 * scale;
    let to_c = |k: usize| -> DVector<C64> {
        let col = evecs.column(k);
        DVector::from_iterator(m, (0..m).map(|i| c64(col[i], col[i + m])))
    };
    let mut vecs: Vec<DVector<C64>> = Vec::with_capacity(m);
    let mut lambda = Vec::with_capacity(m);
    for &k in idx.iter().take(m) {
        if evals[k] > cut {
            vecs.push(to_c(k).normalize());
            lambda.push(evals[k]);
        }
    }
    if vecs.len() < m {
        // Null cluster: all eigenvectors with |ev| <= cut span a J-invariant
        // real subspace; extract a complex orthonormal basis from it.
        let cands: Vec<DVector<C64>> =
            idx.iter().filter(|&&k| evals[k].abs() <= cut).map(|&k| to_c(k)).collect();
        let need = m - vecs.len();
        let basis = gram_schmidt_pick(&vecs, &cands, need);
        for v in basis {
            vecs.push(v);
            lambda.push(0.0);
        }
    }
    let mut q = CMatrix::zeros(m, m);
    for (k, v) in vecs.iter().enumerate() {
        q.set_column(k, v);
    }
    let u = q.adjoint();
    // Exact diagonal phase clean-up for positive values.
    let mut u = u;
    let d = &u * &es * u.transpose();
    for k in 0..m {
        if lambda[k] > cut {
            let ph = d[(k, k)] / d[(k, k)].norm();
            let f = ph.conj().sqrt();
            for j in 0..m {
                u[(k, j)] *= f;
            }
        }
        // Row sign is free; make the largest entry point to the right.
        let piv = (0..m).max_by(|&i, &j| u[(k, i)].norm().partial_cmp(&u[(k, j)].norm()).unwrap()).unwrap();
        if u[(k, piv)].re < 0.0 {
            for j in 0..m {
                u[(k, j)] = -u[(k, j)];
            }
        }
    }
    Ok(TakagiResult { lambda, u })
}

/// Greedy complex Gram-Schmidt: orthogonalize candidates against `fixed` and
/// each other, always taking the candidate with the largest residual.
pub fn gram_schmidt_pick(fixed: &[DVector<C64>], cands: &[DVector<C64>], need: usize) -> Vec<DVector<C64>> {
    let mut basis: Vec<DVector<C64>> = fixed.to_vec();
    let mut out = Vec::new();
    let mut pool: Vec<DVector<C64>> = cands.to_vec();
    for _ in 0..need {
        for v in pool.iter_mut() {
            for b in &basis {
                let p = b.dotc(v);
                *v -= b * p;
            }
        }
        let (best, norm) = pool
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.norm()))
            .fold((usize::MAX, -1.0), |acc, x| if x.1 > acc.1 + 1e-12 { x } else { acc });
        if best == usize::MAX || norm <= 1e-12 {
            break;
        }
        let v = pool[best].unscale(norm);
        basis.push(v.clone());
        out.push(v);
    }
    out
}

/// True iff `U` is unitary and fixes `D(lambda)` under `U D U^T`, within tolerance.
pub fn takagi_stabilizer_check(u: &CMatrix, lambda: &[f64]) -> bool {
    let m = lambda.len();
    if u.nrows() != m || u.ncols() != m {
        return false;
    }
    let id = CMatrix::identity(m, m);
    if fro(&(u.adjoint() * u - &id)) > EPS * (m as f64).max(1.0) {
        return false;
    }
    let d = from_real_diag(lambda);
    fro(&(u * &d * u.transpose() - &d)) <= EPS * (1.0 + fro(&d))
}

/// `Some(+1)` if `U* I U = I`, `Some(-1)` if `U* I U = -I`, where `I = I_{r,s}`.
pub fn is_hat_u(u: &CMatrix, r: usize, s: usize) -> Option<i32> {
    let i = i_rs(r, s);
    if u.nrows() != r + s || u.ncols() != r + s {
        return None;
    }
    let g = u.adjoint() * &i * u;
    if fro(&(&g - &i)) <= EPS * (1.0 + fro(u).powi(2)) {
        Some(1)
    } else if fro(&(&g + &i)) <= EPS * (1.0 + fro(u).powi(2)) {
        Some(-1)
    } else {
        None
    }
}

/// True iff `B^T R B = R`.
pub fn is_o_r(b: &CMatrix, r: &CMatrix) -> bool {
    b.nrows() == r.nrows() && fro(&(b.transpose() * r * b - r)) <= EPS * (1.0 + fro(r) * (1.0 + fro(b)).powi(2))
}

// nalgebra's SVD is inaccurate on some sparse, rank-deficient inputs
// (errors up to 1e-3 were seen), so decompositions go through faer.
fn to_faer(a: &CMatrix) -> faer::Mat<C64> {
    faer::Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

fn to_faer_real(a: &RMatrix) -> faer::Mat<f64> {
    faer::Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// Full SVD with singular values in descending order: `(s, U, V)`.
fn svd_full(a: &CMatrix) -> (Vec<f64>, CMatrix, CMatrix) {
    let (m, n) = a.shape();
    let svd = to_faer(a).svd().expect("svd converges");
    let (u, v, sd) = (svd.U(), svd.V(), svd.S());
    let k = m.min(n);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| sd[j].re.partial_cmp(&sd[i].re).unwrap());
    let s = order.iter().map(|&i| sd[i].re).collect();
    let perm = |i: usize| if i < k { order[i] } else { i };
    let uu = CMatrix::from_fn(m, m, |i, j| u[(i, perm(j))]);
    let vv = CMatrix::from_fn(n, n, |i, j| v[(i, perm(j))]);
    (s, uu, vv)
}

fn svd_full_real(a: &RMatrix) -> (Vec<f64>, RMatrix, RMatrix) {
    let (m, n) = a.shape();
    let svd = to_faer_real(a).svd().expect("svd converges");
    let (u, v, sd) = (svd.U(), svd.V(), svd.S());
    let k = m.min(n);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| sd[j].partial_cmp(&sd[i]).unwrap());
    let s = order.iter().map(|&i| sd[i]).collect();
    let perm = |i: usize| if i < k { order[i] } else { i };
    let uu = RMatrix::from_fn(m, m, |i, j| u[(i, perm(j))]);
    let vv = RMatrix::from_fn(n, n, |i, j| v[(i, perm(j))]);
    (s, uu, vv)
}

/// Eigenvalues (descending) and orthonormal eigenvectors of a real
/// symmetric matrix.
pub(crate) fn sym_eig_real(a: &RMatrix) -> (Vec<f64>, RMatrix) {
    let n = a.nrows();
    let eig = to_faer_real(a).self_adjoint_eigen(faer::Side::Lower).expect("eigen converges");
    let (sd, u) = (eig.S(), eig.U());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sd[j].partial_cmp(&sd[i]).unwrap());
    (order.iter().map(|&i| sd[i]).collect(), RMatrix::from_fn(n, n, |i, j| u[(i, order[j])]))
}

fn rank_of(s: &[f64], tol: f64) -> usize {
    let cut = tol * (s.first().copied().unwrap_or(0.0) + 1.0);
    s.iter().filter(|&&x| x > cut).count()
}

pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    if a.is_empty() {
        return vec![];
    }
    let mut s: Vec<f64> = {
        let sd = to_faer(a).singular_values().expect("svd converges");
        sd.into_iter().collect()
    };
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    s
}

/// Singular values of a real matrix, descending.
pub fn singular_values_real(a: &RMatrix) -> Vec<f64> {
    if a.is_empty() {
        return vec![];
    }
    let mut s: Vec<f64> = to_faer_real(a).singular_values().expect("svd converges").into_iter().collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    s
}

/// Numerical rank with threshold `tol * (sigma_max + 1)`.
pub fn rank(a: &CMatrix, tol: f64) -> usize {
    rank_of(&singular_values(a), tol)
}

/// Orthonormal basis (columns) of the kernel.
pub fn nullspace(a: &CMatrix, tol: f64) -> CMatrix {
    let n = a.ncols();
    if a.nrows() == 0 {
        return CMatrix::identity(n, n);
    }
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    let (s, _, v) = svd_full(a);
    let r = rank_of(&s, tol);
    v.columns(r, n - r).into_owned()
}

/// Orthonormal basis (columns) of the column space.
pub fn colspace(a: &CMatrix, tol: f64) -> CMatrix {
    if a.ncols() == 0 || a.nrows() == 0 {
        return CMatrix::zeros(a.nrows(), 0);
    }
    let (s, u, _) = svd_full(a);
    u.columns(0, rank_of(&s, tol)).into_owned()
}

/// Orthonormal basis (columns) of the column space of a real matrix.
pub fn colspace_real(a: &RMatrix, tol: f64) -> RMatrix {
    if a.ncols() == 0 || a.nrows() == 0 {
        return RMatrix::zeros(a.nrows(), 0);
    }
    let (s, u, _) = svd_full_real(a);
    u.columns(0, rank_of(&s, tol)).into_owned()
}

/// Minimum-norm least-squares solution.
pub fn lstsq(a: &CMatrix, b: &DVector<C64>, tol: f64) -> DVector<C64> {
    if a.ncols() == 0 {
        return DVector::zeros(0);
    }
    if a.nrows() == 0 {
        return DVector::zeros(a.ncols());
    }
    let (s, u, v) = svd_full(a);
    let mut x = DVector::zeros(a.ncols());
    for i in 0..rank_of(&s, tol) {
        let c = u.column(i).dotc(b) / s[i];
        x += v.column(i) * c;
    }
    x
}

/// Real minimum-norm least squares.
pub fn lstsq_real(a: &RMatrix, b: &DVector<f64>, tol: f64) -> DVector<f64> {
    if a.ncols() == 0 || a.nrows() == 0 {
        return DVector::zeros(a.ncols());
    }
    let (s, u, v) = svd_full_real(a);
    let mut x = DVector::zeros(a.ncols());
    for i in 0..rank_of(&s, tol) {
        x += v.column(i) * (u.column(i).dot(b) / s[i]);
    }
    x
}

/// Principal angles between the column spaces of two matrices
/// with orthonormal columns.
pub fn principal_angles(a: &CMatrix, b: &CMatrix) -> Vec<f64> {
    if a.ncols() == 0 || b.ncols() == 0 {
        return vec![];
    }
    // cosines alone lose accuracy near zero angle; pair them with sines
    let cos = singular_values(&(a.adjoint() * b));
    let mut sin = singular_values(&(b - a * (a.adjoint() * b)));
    sin.reverse();
    cos.iter().zip(sin.iter().chain(std::iter::repeat(&0.0))).map(|(&c, &s)| s.atan2(c)).collect()
}

/// True iff two orthonormal bases span the same subspace.
pub fn same_subspace(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
    if a.ncols() != b.ncols() {
        return false;
    }
    // sin of the largest angle, robust near zero angle
    let pa = b - a * (a.adjoint() * b);
    let pb = a - b * (b.adjoint() * a);
    fro(&pa) <= tol && fro(&pb) <= tol
}
