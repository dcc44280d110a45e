//! Shared helpers for the integration suites.

use radpat::geometry::Direction;
use radpat::models::BasisSpec;

/// Gauss-Legendre nodes and weights on [-1, 1].
///
/// Newton iteration on the Legendre recurrence; exact for polynomial
/// integrands of degree up to 2n - 1. Independent of the crate's own
/// Legendre code, so it can serve as an oracle for it.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 2);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Tricomi-style initial guess, then Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

/// P_n(x) and its derivative via the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gram matrix of a basis under product quadrature over the sphere:
/// `n_gl` Gauss-Legendre nodes in sin(inclination) times `n_az` uniform
/// azimuth nodes. Row-major `dim x dim`.
pub fn quadrature_gram(spec: &BasisSpec, n_gl: usize, n_az: usize) -> Vec<f64> {
    let ev = spec.evaluator().expect("valid spec");
    let dim = ev.dimension();
    let mut gram = vec![0.0; dim * dim];
    let mut basis = vec![0.0; dim];
    let az_w = 2.0 * std::f64::consts::PI / n_az as f64;
    for (x, w) in gauss_legendre(n_gl) {
        let beta = x.asin();
        for j in 0..n_az {
            let alpha = -std::f64::consts::PI + (j as f64 + 0.5) * az_w;
            ev.eval_into(Direction::new(alpha, beta), &mut basis);
            let weight = w * az_w;
            for r in 0..dim {
                let br = weight * basis[r];
                for c in 0..dim {
                    gram[r * dim + c] += br * basis[c];
                }
            }
        }
    }
    gram
}

/// Sample standard deviation is deliberately not used here: acceptance
/// bounds are quoted against the population form.
pub fn population_std(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}
