//! Associated Legendre functions P_l^m(x).
//!
//! Computed by the standard recurrences, upward in degree l:
//!
//! ```text
//! P_m^m(x)     = (2m-1)!! (1-x^2)^(m/2)
//! P_{m+1}^m(x) = x (2m+1) P_m^m(x)
//! (l-m) P_l^m(x) = x (2l-1) P_{l-1}^m(x) - (l+m-1) P_{l-2}^m(x)
//! ```
//!
//! This is the convention WITHOUT the Condon-Shortley (-1)^m factor, i.e.
//! `P_l^m(x) = (1-x^2)^(m/2) d^m/dx^m P_l(x)`; the real spherical-harmonic
//! basis built on top of it carries no sign factor either. Stable for the
//! moderate degrees used by the pattern bases (l below roughly 50).

/// P_l^m(x) without the Condon-Shortley phase.
///
/// Requires `m <= l` and `|x| <= 1`.
pub fn assoc_legendre(l: usize, m: usize, x: f64) -> f64 {
    assert!(m <= l, "assoc_legendre requires m <= l, got l={l} m={m}");
    assert!(
        (-1.0..=1.0).contains(&x),
        "assoc_legendre requires |x| <= 1, got {x}"
    );

    // (1-x)(1+x) instead of 1-x^2 keeps precision near |x| = 1
    let somx2 = ((1.0 - x) * (1.0 + x)).sqrt();
    let mut pmm = 1.0;
    let mut odd = 1.0;
    for _ in 0..m {
        pmm *= odd * somx2;
        odd += 2.0;
    }
    if l == m {
        return pmm;
    }

    let mut pmmp1 = x * (2 * m + 1) as f64 * pmm;
    if l == m + 1 {
        return pmmp1;
    }

    for ll in (m + 2)..=l {
        let pll = (x * (2 * ll - 1) as f64 * pmmp1 - (ll + m - 1) as f64 * pmm)
            / (ll - m) as f64;
        pmm = pmmp1;
        pmmp1 = pll;
    }
    pmmp1
}
