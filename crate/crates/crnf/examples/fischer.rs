//! Fischer decomposition `F = p G + H` with `pbar(nabla) H = 0`.

use crnf::parse::parse_series;
use crnf::series::fischer::fischer_decompose;

fn main() {
    // p = <z, zb> on C^2, F of type (2, 2)
    let p = parse_series("z1*zb1 + z2*zb2", Some(2), 100).unwrap();
    let f = parse_series("z1^2*zb1^2 + 3*z1*z2*zb2^2 - z2^2*zb1*zb2", Some(2), 100).unwrap();
    let d = fischer_decompose(&f, &p).unwrap();
    println!("G = {}", d.g);
    println!("H = {}", d.h);
    println!("residual {:.1e}, side condition {:.1e}", d.residual, d.side_residual);
}
