//! Bounds on the dimension of the stability group at a generic
//! semidefinite Levi degeneracy.

use crnf::partial_nf::aut_dim_bound;

fn main() {
    for lambda in [vec![0.0], vec![1.0], vec![0.0, 0.0], vec![1.0, 0.5], vec![1.0, 1.0], vec![1.0, 0.5, 0.0]] {
        let n = lambda.len() + 1;
        println!("n = {n}, lambda = {lambda:?}: {}", aut_dim_bound(n, &lambda));
    }
}
