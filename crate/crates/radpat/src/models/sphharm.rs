//! Real orthonormal spherical harmonics on (azimuth, inclination) directions.
//!
//! An order-n basis contains every degree l in 0..n and every order m in
//! -l..=l, so it spans n^2 functions. Entries are laid out (l, m)
//! lexicographically: (0,0), (1,-1), (1,0), (1,+1), (2,-2), ...
//!
//! With colatitude theta = pi/2 - inclination and longitude = azimuth:
//!
//! ```text
//! Y_{l,0}  = N(l,0)            P_l^0(cos theta)
//! Y_{l,m}  = sqrt(2) N(l,m)    P_l^m(cos theta) cos(m azimuth)   (m > 0)
//! Y_{l,-m} = sqrt(2) N(l,m)    P_l^m(cos theta) sin(m azimuth)   (m > 0)
//! N(l,m)   = sqrt((2l+1)/(4 pi) * (l-m)!/(l+m)!)
//! ```
//!
//! P_l^m carries no Condon-Shortley factor (see [`super::legendre`]), and
//! neither does the basis: the functions are orthonormal with respect to the
//! uniform measure on the sphere, with Y_{0,0} = 1/sqrt(4 pi) > 0 and the
//! familiar Cartesian forms (Y_{1,-1} ~ y, Y_{1,0} ~ z, Y_{1,1} ~ x, all
//! with positive coefficients).

use crate::geometry::Direction;

use super::legendre::assoc_legendre;

/// Number of basis functions of an order-n basis.
#[inline]
pub fn dimension(order: usize) -> usize {
    order * order
}

/// Evaluates the order-n basis at `dir` into `out` (length must be n^2).
///
/// cos(colatitude) = sin(inclination), sin(colatitude) = cos(inclination);
/// the latter is never negative because inclination lies in [-pi/2, pi/2],
/// which is what lets the P_l^m recurrence run on (sin beta, cos beta)
/// directly.
pub fn basis_into(order: usize, dir: Direction, out: &mut [f64]) {
    assert!(order >= 1, "spherical-harmonic order must be at least 1");
    assert_eq!(out.len(), dimension(order), "output slice has wrong length");

    let ct = dir.inclination().sin(); // cos(colatitude)
    let alpha = dir.azimuth();
    let four_pi = 4.0 * std::f64::consts::PI;

    let mut idx = 0;
    for l in 0..order {
        for m_signed in -(l as isize)..=(l as isize) {
            let m = m_signed.unsigned_abs();
            // N(l,m)^2 = (2l+1)/(4 pi) * (l-m)!/(l+m)!
            let mut ratio = 1.0;
            for k in (l - m + 1)..=(l + m) {
                ratio *= k as f64;
            }
            let norm = ((2 * l + 1) as f64 / (four_pi * ratio)).sqrt();
            let plm = assoc_legendre(l, m, ct);
            out[idx] = if m_signed == 0 {
                norm * plm
            } else if m_signed > 0 {
                std::f64::consts::SQRT_2 * norm * plm * (m as f64 * alpha).cos()
            } else {
                std::f64::consts::SQRT_2 * norm * plm * (m as f64 * alpha).sin()
            };
            idx += 1;
        }
    }
}

/// Convenience wrapper allocating the output vector.
pub fn basis(order: usize, dir: Direction) -> Vec<f64> {
    let mut out = vec![0.0; dimension(order)];
    basis_into(order, dir, &mut out);
    out
}
