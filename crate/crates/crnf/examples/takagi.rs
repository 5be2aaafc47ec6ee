//! Takagi factorization `U E U^T = diag(lambda)` of a complex symmetric
//! matrix.

use crnf::linalg::{takagi, CMatrix};
use crnf::series::c64;

fn main() {
    let e = CMatrix::from_row_slice(
        3,
        3,
        &[c64(1.0, 0.5), c64(0.2, -0.1), c64(0.0, 0.3), c64(0.2, -0.1), c64(-0.4, 0.0), c64(0.7, 0.2), c64(0.0, 0.3), c64(0.7, 0.2), c64(0.1, 1.0)],
    );
    let t = takagi(&e).unwrap();
    println!("lambda = {:?}", t.lambda);
    let d = &t.u * &e * t.u.transpose();
    println!("|U E U^T - D| = {:.2e}", (d - CMatrix::from_diagonal(&t.lambda.iter().map(|&x| c64(x, 0.0)).collect::<Vec<_>>().into())).norm());
    println!("|U U* - I|    = {:.2e}", (&t.u * t.u.adjoint() - CMatrix::identity(3, 3)).norm());
}
