//! Finite nondegeneracy through the increasing spaces `E_j`.

use crnf::cr_tensors::{e_spaces, nondegeneracy, GenericSubmanifold};
use crnf::hypersurface::{Hypersurface, SemidefCase};

fn main() {
    let cases = [
        ("sphere", Hypersurface::sphere(2, 6)),
        ("model, lambda = 0", Hypersurface::semidef_model(SemidefCase::III, &[0.0], 8)),
        ("hyperplane", Hypersurface::flat(2, 8)),
    ];
    for (name, h) in cases {
        let m = GenericSubmanifold::from_hypersurface(&h);
        let dims: Vec<usize> = e_spaces(&m, 4).unwrap().iter().map(|e| e.dim()).collect();
        match nondegeneracy(&m, 5).unwrap() {
            Some(k) => println!("{name}: {k}-nondegenerate, dim E_j = {dims:?}"),
            None => println!("{name}: not finitely nondegenerate up to k = 5, dim E_j = {dims:?}"),
        }
    }
}
