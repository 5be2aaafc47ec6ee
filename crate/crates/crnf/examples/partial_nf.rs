//! Partial normal form: a hypersurface with a semidefinite Levi form of
//! rank n - 1 is brought to one of three model forms, read off with its
//! invariant lambda.

use crnf::hypersurface::{Hypersurface, SemidefCase};
use crnf::linalg::CMatrix;
use crnf::map::{apply_map, FormalMap};
use crnf::partial_nf::partial_nf;
use crnf::series::{c64, Series, Space};
use nalgebra::DVector;

fn main() {
    let model = Hypersurface::semidef_model(SemidefCase::III, &[1.0, 0.3], 6);
    // hide it behind a linear change of coordinates and a few extra terms
    let a = CMatrix::from_row_slice(
        3,
        3,
        &[c64(1.0, 0.2), c64(0.3, 0.0), c64(0.0, 0.1), c64(0.0, -0.4), c64(0.9, 0.0), c64(0.2, 0.2), c64(0.1, 0.0), c64(0.0, 0.3), c64(1.1, 0.0)],
    );
    let b = DVector::from_vec(vec![c64(0.1, 0.0), c64(0.0, 0.2), c64(-0.3, 0.1)]);
    let lin = FormalMap::linear(&a, &b, c64(1.5, 0.0), 6);
    let extra = Series::monomial(Space::Mixed(3), 6, &[2, 0, 0, 1, 0, 1, 0], c64(0.4, -0.2));
    let m = apply_map(&model, &lin).unwrap().plus(&(&extra + &extra.conj())).unwrap();

    let res = partial_nf(&m).unwrap();
    println!("case {}, r = {}, s = {}", res.case.tag(), res.r, res.s);
    println!("lambda = {:?}", res.lambda.unwrap());
    println!("stability group dimension at most {}", res.aut_dim_bound.unwrap());
    println!("through degree 3: {}", res.m_out.phi().truncated(3));
}
