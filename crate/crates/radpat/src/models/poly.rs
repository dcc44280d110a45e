//! Bivariate monomial basis in the raw angles.
//!
//! Order k spans every monomial `azimuth^i * inclination^j` with
//! `i + j <= k`, in graded-lexicographic order: total degree ascending,
//! and within a degree the azimuth power descending. Order 1 is
//! `[1, azimuth, inclination]`; the dimension is (k+1)(k+2)/2.
//!
//! The angles enter in radians, so high orders mix magnitudes from 1 up to
//! pi^k and produce badly conditioned normal equations; that is inherent to
//! this basis and left visible rather than patched with hidden rescaling.

use crate::geometry::Direction;

#[inline]
pub fn dimension(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

/// Evaluates the order-k monomial basis at `dir` into `out`.
pub fn basis_into(order: usize, dir: Direction, out: &mut [f64]) {
    assert_eq!(out.len(), dimension(order), "output slice has wrong length");
    let a = dir.azimuth();
    let b = dir.inclination();
    // powers up to `order` of each angle, computed once
    let mut pa = vec![1.0; order + 1];
    let mut pb = vec![1.0; order + 1];
    for i in 1..=order {
        pa[i] = pa[i - 1] * a;
        pb[i] = pb[i - 1] * b;
    }
    let mut idx = 0;
    for total in 0..=order {
        for i in (0..=total).rev() {
            out[idx] = pa[i] * pb[total - i];
            idx += 1;
        }
    }
}
