//! Equivalence at truncation scale: a hypersurface and its image under a
//! random allowed change of coordinates have the same normal form at
//! matched normalizations.

use crnf::equivalence::{equivalent_to_degree, random_allowed_map};
use crnf::full_nf::NormalizationP;
use crnf::hypersurface::Hypersurface;
use crnf::linalg::from_real_diag;
use crnf::map::apply_map;
use crnf::parse::parse_series;

fn main() {
    let rmat = from_real_diag(&[1.0]);
    let extra = parse_series("0.5*z1^2*zb1^2*(z2 + zb2) + 0.1*s^2*z1*zb1", Some(2), 7).unwrap();
    let m = Hypersurface::model(1, &rmat, 7).plus(&extra).unwrap();
    let moved = random_allowed_map(1, &rmat, 42, 0.3, 7).unwrap();
    let m2 = apply_map(&m, &moved.map).unwrap();
    println!("|phi - phi'| = {:.3}", m.phi().dist(m2.phi()));

    let rep = equivalent_to_degree(&m, &m2, &NormalizationP::identity(2), &moved.p, 7).unwrap();
    println!("invariants match: {}", rep.invariants_match);
    println!("normal forms match: {} (deviation {:.1e})", rep.normal_forms_match, rep.max_deviation.unwrap());

    // zb2 z1^4 + c.c. already lies in the normal space
    let bumped = m.plus(&parse_series("0.01*(zb2*z1^4 + z2*zb1^4)", Some(2), 7).unwrap()).unwrap();
    let rep = equivalent_to_degree(&m, &bumped, &NormalizationP::identity(2), &NormalizationP::identity(2), 7).unwrap();
    println!("after an extra normal-space term: match {}, deviation {:.1e}", rep.normal_forms_match, rep.max_deviation.unwrap());
}
