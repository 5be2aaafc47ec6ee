//! Complete normal form: all terms outside the normal space are removed
//! degree by degree, and rerunning on the result changes nothing.

use crnf::full_nf::{check_g0, normal_form, NormalizationP};
use crnf::hypersurface::Hypersurface;
use crnf::linalg::from_real_diag;
use crnf::normal_space::is_in_normal_space;
use crnf::parse::parse_series;

fn main() {
    let rmat = from_real_diag(&[0.5]);
    let extra = parse_series("z1^2*zb1^2 + 0.3*(z1^4 + zb1^4) + 0.2*(i*z1^2*zb2*s - i*zb1^2*z2*s)", Some(2), 6).unwrap();
    let m = Hypersurface::model(1, &rmat, 6).plus(&extra).unwrap();

    let res = normal_form(&m, &NormalizationP::identity(2), 6).unwrap();
    println!("N = {}", res.normal);
    for d in &res.diagnostics {
        println!("degree {}: {} equations, sigma_min/sigma_max = {:.3e}, residual {:.1e}", d.nu, d.dim, d.sigma_min, d.residual);
    }
    println!("N in normal space: {}", is_in_normal_space(&res.normal, 1, &rmat).unwrap());
    println!("T in G0: {}", check_g0(&res.t));

    let again = normal_form(&res.m_out, &NormalizationP::identity(2), 6).unwrap();
    println!("second pass moves by {:.1e}", again.t.dist(&crnf::map::FormalMap::identity(2, 6)));
}
