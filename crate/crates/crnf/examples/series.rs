//! Truncated weighted series: products, substitution and the graph of a
//! hypersurface written as a complex defining equation.

use crnf::series::{c64, graph_to_complex, Series, Space};

fn main() {
    let sp = Space::Holo(1);
    let (z, w) = (Series::var(sp, 6, 0), Series::var(sp, 6, 1));
    // w has weight 2, so (z + w)^3 keeps terms up to weighted degree 6
    let p = (&z + &w).pow(3);
    println!("(z + w)^3 = {p}");

    // substitute z -> z + z^2, w -> 2w
    let q = p.substitute(&[&z + &z.pow(2), w.scale_re(2.0)], sp).unwrap();
    println!("after substitution: {q}");

    // im w = |z|^2 as a complex equation w = Q(z, zb, wb)
    let m = Space::Mixed(1);
    let phi = Series::monomial(m, 6, &[1, 1, 0], c64(1.0, 0.0));
    println!("Q = {}", graph_to_complex(&phi, 6).unwrap());
}
