//! Kernel basis on a fixed azimuth/inclination lattice.
//!
//! Nodes form `n_inclination` rows by `n_azimuth` columns. Inclination rows
//! span [-pi/2, pi/2] inclusively (a single row sits at 0); azimuth columns
//! sit at cell centers of (-pi, pi], which keeps -pi and +pi from producing
//! duplicate seam nodes. Entry (row j, column i) lives at index
//! `j * n_azimuth + i`.
//!
//! The basis element for node q is `exp(-delta / (2 sigma))` where `delta`
//! is the central angle between the sample direction and the node. Note the
//! exponent is linear in the angle, not squared: the kernel is a Laplacian
//! bump, very concentrated for small sigma. With the rows inclusive of the
//! poles, all `n_azimuth` nodes of a pole row coincide; the resulting
//! duplicate columns are tolerated by the ridge solve (coefficients split
//! evenly) and keep the advertised parameter count exact.

use crate::geometry::{angular_distance, Direction};

/// Node directions in index order (row-major, inclination rows first).
pub fn nodes(n_inclination: usize, n_azimuth: usize) -> Vec<Direction> {
    assert!(n_inclination >= 1 && n_azimuth >= 1);
    let mut out = Vec::with_capacity(n_inclination * n_azimuth);
    for j in 0..n_inclination {
        let beta = if n_inclination == 1 {
            0.0
        } else {
            -std::f64::consts::FRAC_PI_2
                + j as f64 * std::f64::consts::PI / (n_inclination - 1) as f64
        };
        for i in 0..n_azimuth {
            let alpha = -std::f64::consts::PI
                + (i as f64 + 0.5) * (2.0 * std::f64::consts::PI / n_azimuth as f64);
            out.push(Direction::new(alpha, beta));
        }
    }
    out
}

/// Evaluates the kernel features of `dir` against `nodes` into `out`.
pub fn basis_into(nodes: &[Direction], sigma: f64, dir: Direction, out: &mut [f64]) {
    assert_eq!(out.len(), nodes.len(), "output slice has wrong length");
    assert!(sigma > 0.0 && sigma.is_finite());
    let inv = 1.0 / (2.0 * sigma);
    for (o, &node) in out.iter_mut().zip(nodes) {
        *o = (-angular_distance(dir, node) * inv).exp();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn layout_and_count() {
        let n = nodes(10, 20);
        assert_eq!(n.len(), 200);
        // first row is the south pole, last the north pole
        assert_abs_diff_eq!(n[0].inclination(), -FRAC_PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(n[199].inclination(), FRAC_PI_2, epsilon = 1e-15);
        // azimuth cell centers: first at -pi + pi/20, no node on the seam
        assert_abs_diff_eq!(n[0].azimuth(), -PI + PI / 20.0, epsilon = 1e-15);
        assert!(n.iter().all(|d| d.azimuth() > -PI && d.azimuth() < PI));
        // consecutive columns step by 2 pi / 20
        assert_abs_diff_eq!(
            n[1].azimuth() - n[0].azimuth(),
            2.0 * PI / 20.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn single_row_sits_on_the_equator() {
        let n = nodes(1, 4);
        assert!(n.iter().all(|d| d.inclination() == 0.0));
    }

    #[test]
    fn kernel_is_one_at_the_node_and_frozen_at_the_antipode() {
        let n = nodes(10, 20);
        let sigma = 0.03;
        let mut feats = vec![0.0; n.len()];
        // pick a non-pole node so its antipode is another lattice direction
        let probe = n[3 * 20 + 7];
        basis_into(&n, sigma, probe, &mut feats);
        assert_abs_diff_eq!(feats[3 * 20 + 7], 1.0, epsilon = 1e-12);

        // antipode of (alpha, beta) is (alpha +/- pi, -beta); frozen oracle
        // value exp(-pi / 0.06) = 1.8213529044533941e-23
        let anti = Direction::new(probe.azimuth() + PI, -probe.inclination());
        let mut f2 = vec![0.0; n.len()];
        basis_into(&n, sigma, anti, &mut f2);
        let got = f2[3 * 20 + 7];
        assert!(
            (got - 1.821352904453394e-23).abs() < 1e-32,
            "antipodal kernel value {got}"
        );
    }

    #[test]
    fn features_decay_monotonically_with_angle() {
        let n = nodes(1, 1); // single node at (azimuth -pi/2... cell center) and beta 0
        let node = n[0];
        let sigma = 0.3;
        let mut prev = f64::INFINITY;
        for k in 0..=10 {
            let d = Direction::new(node.azimuth(), node.inclination() + k as f64 * 0.15);
            let mut f = [0.0];
            basis_into(&n, sigma, d, &mut f);
            assert!(f[0] <= prev);
            assert!(f[0] > 0.0);
            prev = f[0];
        }
    }
}
