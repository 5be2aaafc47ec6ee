use super::{c64, Series, Space};
use crate::error::{Error, Result};

/// Complex defining function `w = Q(z, zb, wb)` of the graph
/// `im w = phi(z, zb, re w)`. Solved by fixed-point iteration
/// `Q = wb + 2i phi(z, zb, (Q + wb)/2)`.
pub fn graph_to_complex(phi: &Series, trunc: i32) -> Result<Series> {
    let n = match phi.space() {
        Space::Mixed(n) => n,
        sp => return Err(Error::SpaceMismatch(format!("expected a mixed series, got {sp:?}"))),
    };
    if !phi.is_real(1e-12) {
        return Err(Error::NonReal);
    }
    let trunc = trunc.min(phi.trunc());
    let cs = Space::Complexified(n);
    let wb = Series::var(cs, trunc, 2 * n);
    let mut images: Vec<Series> = (0..2 * n).map(|i| Series::var(cs, trunc, i)).collect();
    images.push(wb.clone());
    let mut q = wb.clone();
    for _ in 0..=trunc {
        images[2 * n] = (&q + &wb).scale_re(0.5);
        let next = &wb + &phi.substitute(&images, cs)?.scale(c64(0.0, 2.0));
        let done = next.dist(&q) == 0.0;
        q = next;
        if done {
            break;
        }
    }
    Ok(q.truncated(trunc))
}

/// Inverse of [`graph_to_complex`]: with `R = Q - wb`, iterate
/// `t = R(z, zb, s - i t) / (2i)`.
pub fn complex_to_graph(q: &Series, trunc: i32) -> Result<Series> {
    let n = match q.space() {
        Space::Complexified(n) => n,
        sp => return Err(Error::SpaceMismatch(format!("expected a complexified series, got {sp:?}"))),
    };
    let trunc = trunc.min(q.trunc());
    let cs = Space::Complexified(n);
    let ms = Space::Mixed(n);
    let r = q - &Series::var(cs, trunc, 2 * n);
    let s = Series::var(ms, trunc, 2 * n);
    let mut images: Vec<Series> = (0..2 * n).map(|i| Series::var(ms, trunc, i)).collect();
    images.push(s.clone());
    let mut t = Series::zero(ms, trunc);
    for _ in 0..=trunc {
        images[2 * n] = &s - &t.scale(c64(0.0, 1.0));
        let next = r.substitute(&images, ms)?.scale(c64(0.0, -0.5));
        let done = next.dist(&t) == 0.0;
        t = next;
        if done {
            break;
        }
    }
    Ok(t.truncated(trunc))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_term() {
        let ms = Space::Mixed(1);
        let phi = &Series::var(ms, 6, 0) * &Series::var(ms, 6, 1);
        let q = graph_to_complex(&phi, 6).unwrap();
        assert_eq!(q.len(), 2);
        assert_eq!(q.coeff_of(&[1, 1, 0]), c64(0.0, 2.0));
        assert_eq!(q.coeff_of(&[0, 0, 1]), c64(1.0, 0.0));
        let back = complex_to_graph(&q, 6).unwrap();
        assert!(back.dist(&phi) < 1e-14);
    }

    #[test]
    fn zero_graph() {
        let q = graph_to_complex(&Series::zero(Space::Mixed(2), 6), 6).unwrap();
        assert_eq!(q.len(), 1);
    }
}
