//! Levi form, the third-order tensor and the cubic form of the model
//! `im w = |z1|^2 + |z2|^2 + 2 Re(zb3 (z1^2 + 0.5 z2^2 + z3^2))`.

use crnf::cr_tensors::{cubic_form, levi_form, third_tensor};
use crnf::hypersurface::{Hypersurface, SemidefCase};

fn main() {
    let m = Hypersurface::semidef_model(SemidefCase::III, &[1.0, 0.5], 6);
    println!("phi = {}", m.phi());
    println!("Levi form:{}", levi_form(&m).unwrap().matrix(0, 0));
    let h = third_tensor(&m).unwrap();
    println!("h (kernel dimension {}):{}", h.f_dim, h.matrix(0, 0));
    println!("symmetry defect {:.1e}", h.symmetry_defect());
    println!("cubic form:{}", cubic_form(&m).unwrap().matrix(0, 0));
}
