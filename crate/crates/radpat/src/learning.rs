//! Decoupling two radiation patterns from one-directional RSSI samples.
//!
//! Each matched sample ties the received power to the sum of both antennas'
//! gains at the directions the platforms saw each other, plus free-space
//! path loss. Subtracting transmit power and path loss leaves the joint
//! gain as a regression target; stacking the transmitter's basis features
//! next to the receiver's turns "split the joint gain into two patterns"
//! into one linear system solved by ridge regression.
//!
//! The joint gain only determines the two patterns up to functions that
//! cancel in every observation (the constant split is the simplest: +c on
//! one pattern, -c on the other). The ridge term selects the minimum-norm
//! representative, which for a pure constant splits it evenly across the
//! two constant-term coefficients.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{path_loss_db, Direction, JointObservation};
use crate::models::BasisSpec;

/// One RSSI measurement with its mutual geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchedSample {
    /// Timestamp in seconds (monotonic within a set; informational here).
    pub t: f64,
    pub obs: JointObservation,
    pub p_tx_dbm: f64,
    pub p_rx_dbm: f64,
}

/// A validated, single-direction set of matched samples.
///
/// All samples travel the same link direction (`tx_id` transmitted,
/// `rx_id` received); mixing directions in one fit is rejected upstream
/// because transmit and receive chains of real radios are not reciprocal.
#[derive(Debug, Clone)]
pub struct TrainingSet {
    samples: Vec<MatchedSample>,
    wavelength: f64,
    tx_id: String,
    rx_id: String,
}

impl TrainingSet {
    pub fn new(
        samples: Vec<MatchedSample>,
        wavelength: f64,
        tx_id: impl Into<String>,
        rx_id: impl Into<String>,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::data("training set is empty"));
        }
        if !wavelength.is_finite() || wavelength <= 0.0 {
            return Err(Error::config(format!(
                "wavelength must be positive and finite, got {wavelength}"
            )));
        }
        for (i, s) in samples.iter().enumerate() {
            if !s.obs.distance.is_finite() || s.obs.distance <= 0.0 {
                return Err(Error::data(format!(
                    "sample {i}: non-positive separation {}",
                    s.obs.distance
                )));
            }
            if !s.p_tx_dbm.is_finite() || !s.p_rx_dbm.is_finite() || !s.t.is_finite() {
                return Err(Error::data(format!("sample {i}: non-finite field")));
            }
        }
        Ok(TrainingSet {
            samples,
            wavelength,
            tx_id: tx_id.into(),
            rx_id: rx_id.into(),
        })
    }

    pub fn samples(&self) -> &[MatchedSample] {
        &self.samples
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn tx_id(&self) -> &str {
        &self.tx_id
    }

    pub fn rx_id(&self) -> &str {
        &self.rx_id
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// A new set containing the samples at `indices` (used by
    /// train/test splitting).
    pub fn subset(&self, indices: &[usize]) -> Result<TrainingSet> {
        let samples = indices
            .iter()
            .map(|&i| {
                self.samples.get(i).copied().ok_or_else(|| {
                    Error::config(format!("subset index {i} out of range ({})", self.len()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        TrainingSet::new(samples, self.wavelength, &self.tx_id, &self.rx_id)
    }
}

/// Joint-gain regression targets: received power minus transmit power minus
/// free-space path loss, in dB. What remains is the sum of both antenna
/// gains at the observed directions (plus noise).
pub fn residual_targets(ts: &TrainingSet) -> Result<Vec<f64>> {
    ts.samples
        .iter()
        .map(|s| Ok(s.p_rx_dbm - s.p_tx_dbm - path_loss_db(ts.wavelength, s.obs.distance)?))
        .collect()
}

/// Stacked design matrix: row i is the transmitter's basis features at the
/// direction it saw the receiver, concatenated with the receiver's features
/// at the direction it saw the transmitter. Shape n x 2*dim(spec).
pub fn build_design_matrix(ts: &TrainingSet, spec: &BasisSpec) -> Result<DMatrix<f64>> {
    let ev = spec.evaluator()?;
    let dim = ev.dimension();
    let n = ts.len();
    let mut rows = vec![0.0; n * 2 * dim];
    for (i, s) in ts.samples.iter().enumerate() {
        let row = &mut rows[i * 2 * dim..(i + 1) * 2 * dim];
        ev.eval_into(s.obs.dir_b_in_a, &mut row[..dim]);
        ev.eval_into(s.obs.dir_a_in_b, &mut row[dim..]);
    }
    Ok(DMatrix::from_row_slice(n, 2 * dim, &rows))
}

/// Below this ridge weight the solve goes through an SVD of the design
/// matrix instead of the normal equations: forming X'X + kI amplifies
/// floating-point noise along near-null directions by 1/k, which destroys
/// per-pattern recovery for tiny k even though predictions stay fine.
pub const RIDGE_SVD_SWITCH: f64 = 1e-6;

/// Minimizes ||X p - y||^2 + kappa ||p||^2 and returns p.
///
/// For `kappa >= 1e-6` the normal equations (X'X + kappa I) p = X'y are
/// solved with a Cholesky factorization; if that factorization fails (the
/// basis can be arbitrarily ill-conditioned, e.g. high-order raw-angle
/// monomials) the solve falls back to the SVD route. For smaller `kappa`,
/// including 0, the SVD of X is used directly: p = V diag(s/(s^2+kappa)) U'y,
/// which is the same minimizer without the 1/kappa noise amplification of
/// the squared system. `kappa = 0` with a column-rank-deficient design is
/// an error rather than a silent pseudo-inverse.
///
/// Deterministic: identical inputs produce bit-identical coefficients.
pub fn ridge_fit(x: &DMatrix<f64>, y: &[f64], kappa: f64) -> Result<Vec<f64>> {
    if !kappa.is_finite() || kappa < 0.0 {
        return Err(Error::config(format!(
            "ridge weight must be finite and non-negative, got {kappa}"
        )));
    }
    if x.nrows() != y.len() {
        return Err(Error::numeric(format!(
            "design matrix has {} rows but {} targets were supplied",
            x.nrows(),
            y.len()
        )));
    }
    if x.ncols() == 0 || x.nrows() == 0 {
        return Err(Error::numeric("empty design matrix"));
    }
    if let Some(v) = y.iter().find(|v| !v.is_finite()) {
        return Err(Error::numeric(format!("non-finite regression target {v}")));
    }
    if !x.iter().all(|v| v.is_finite()) {
        return Err(Error::numeric("non-finite design matrix entry"));
    }

    let yv = DVector::from_column_slice(y);
    if kappa < RIDGE_SVD_SWITCH {
        return ridge_via_svd(x, &yv, kappa);
    }

    let mut a = x.tr_mul(x);
    for i in 0..a.nrows() {
        a[(i, i)] += kappa;
    }
    let b = x.tr_mul(&yv);
    match Cholesky::new(a) {
        Some(chol) => {
            let p = chol.solve(&b);
            if p.iter().all(|v| v.is_finite()) {
                Ok(p.as_slice().to_vec())
            } else {
                log::warn!("normal-equations solve produced non-finite values; retrying via SVD");
                ridge_via_svd(x, &yv, kappa)
            }
        }
        None => {
            log::warn!(
                "normal equations not positive definite at ridge weight {kappa}; \
                 falling back to an SVD solve"
            );
            ridge_via_svd(x, &yv, kappa)
        }
    }
}

fn ridge_via_svd(x: &DMatrix<f64>, y: &DVector<f64>, kappa: f64) -> Result<Vec<f64>> {
    let svd = x.clone().svd(true, true);
    let u = svd.u.as_ref().expect("svd with u");
    let v_t = svd.v_t.as_ref().expect("svd with v_t");
    let s = &svd.singular_values;

    let s_max = s.iter().cloned().fold(0.0_f64, f64::max);
    if kappa == 0.0 {
        let tol = s_max * f64::EPSILON * x.nrows().max(x.ncols()) as f64;
        let rank = s.iter().filter(|&&sv| sv > tol).count();
        if rank < x.ncols() {
            return Err(Error::numeric(format!(
                "design matrix is rank deficient (column rank {rank} of {}); \
                 an unregularized fit has no unique solution - supply a positive ridge weight",
                x.ncols()
            )));
        }
    }

    let mut ut_y = u.tr_mul(y);
    for (j, v) in ut_y.iter_mut().enumerate() {
        let sv = s[j];
        *v *= sv / (sv * sv + kappa);
    }
    let p = v_t.tr_mul(&ut_y);
    if !p.iter().all(|v| v.is_finite()) {
        return Err(Error::numeric("ridge solve produced non-finite coefficients"));
    }
    Ok(p.as_slice().to_vec())
}

/// Two decoupled patterns plus the link metadata needed to predict power.
///
/// `phi` are the coefficients of platform `a_id`'s pattern (the transmitter
/// of the training data), `psi` those of `b_id` (the receiver).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoupledModel {
    pub spec: BasisSpec,
    pub kappa: f64,
    pub wavelength: f64,
    pub a_id: String,
    pub b_id: String,
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
}

impl DecoupledModel {
    /// Gain (dB) of platform `a_id`'s antenna toward `dir` (its body frame).
    pub fn gain_a(&self, dir: Direction) -> f64 {
        self.gain(&self.phi, dir)
    }

    /// Gain (dB) of platform `b_id`'s antenna toward `dir` (its body frame).
    pub fn gain_b(&self, dir: Direction) -> f64 {
        self.gain(&self.psi, dir)
    }

    fn gain(&self, coeffs: &[f64], dir: Direction) -> f64 {
        let ev = self.spec.evaluator().expect("spec validated at fit time");
        ev.eval(dir).iter().zip(coeffs).map(|(f, c)| f * c).sum()
    }

    /// Joint gain (dB) of one mutual observation: a's gain toward b plus
    /// b's gain toward a.
    pub fn predict_gain(&self, obs: &JointObservation) -> f64 {
        self.gain_a(obs.dir_b_in_a) + self.gain_b(obs.dir_a_in_b)
    }

    /// Predicted received power (dBm) for a transmission from `a_id` to
    /// `b_id` with the given transmit power.
    pub fn predict_rx(&self, obs: &JointObservation, p_tx_dbm: f64) -> Result<f64> {
        Ok(p_tx_dbm + self.predict_gain(obs) + path_loss_db(self.wavelength, obs.distance)?)
    }

    /// The a-side pattern as a standalone function.
    pub fn pattern_a(&self) -> crate::models::PatternFunction {
        crate::models::PatternFunction::new(self.spec.clone(), self.phi.clone())
            .expect("model coefficients validated at fit time")
    }

    /// The b-side pattern as a standalone function.
    pub fn pattern_b(&self) -> crate::models::PatternFunction {
        crate::models::PatternFunction::new(self.spec.clone(), self.psi.clone())
            .expect("model coefficients validated at fit time")
    }
}

/// Fits the decoupled model: builds the stacked design, solves the ridge
/// system, and splits the coefficients into the two patterns.
pub fn fit(ts: &TrainingSet, spec: &BasisSpec, kappa: f64) -> Result<DecoupledModel> {
    let x = build_design_matrix(ts, spec)?;
    let y = residual_targets(ts)?;
    let free = 2 * spec.dimension();
    if ts.len() < 2 * free {
        log::warn!(
            "training set has {} samples for {free} free parameters; \
             expect heavy regularization artifacts",
            ts.len()
        );
    }
    let p = ridge_fit(&x, &y, kappa)?;
    let dim = spec.dimension();
    Ok(DecoupledModel {
        spec: spec.clone(),
        kappa,
        wavelength: ts.wavelength(),
        a_id: ts.tx_id().to_string(),
        b_id: ts.rx_id().to_string(),
        phi: p[..dim].to_vec(),
        psi: p[dim..].to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{joint_observation, FullPose, Vec3};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn toy_training_set(n: usize, joint_gain: impl Fn(usize) -> f64) -> TrainingSet {
        // platforms on a slowly precessing baseline so directions spread out
        let wavelength = 0.125;
        let mut samples = Vec::new();
        for i in 0..n {
            let th = i as f64 * 0.7;
            let a = FullPose::level(Vec3::new(0.0, 0.0, 20.0), (i as f64 * 0.31) % 3.0);
            let b = FullPose::level(
                Vec3::new(10.0 * th.cos(), 10.0 * th.sin(), 20.0 + 3.0 * (th * 0.5).sin()),
                -1.0,
            );
            let obs = joint_observation(&a, &b).unwrap();
            let pl = path_loss_db(wavelength, obs.distance).unwrap();
            samples.push(MatchedSample {
                t: i as f64 * 0.01,
                obs,
                p_tx_dbm: 20.0,
                p_rx_dbm: 20.0 + joint_gain(i) + pl,
            });
        }
        TrainingSet::new(samples, wavelength, "a", "b").unwrap()
    }

    #[test]
    fn residual_targets_recover_the_injected_joint_gain() {
        let ts = toy_training_set(40, |i| i as f64 * 0.1 - 2.0);
        let y = residual_targets(&ts).unwrap();
        for (i, v) in y.iter().enumerate() {
            assert_abs_diff_eq!(*v, i as f64 * 0.1 - 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn design_matrix_stacks_both_views() {
        let ts = toy_training_set(7, |_| 0.0);
        let spec: BasisSpec = "sh:3".parse().unwrap();
        let x = build_design_matrix(&ts, &spec).unwrap();
        assert_eq!((x.nrows(), x.ncols()), (7, 18));
        let ev = spec.evaluator().unwrap();
        let s = &ts.samples()[4];
        let left = ev.eval(s.obs.dir_b_in_a);
        let right = ev.eval(s.obs.dir_a_in_b);
        for j in 0..9 {
            assert_eq!(x[(4, j)], left[j]);
            assert_eq!(x[(4, 9 + j)], right[j]);
        }
    }

    #[test]
    fn ridge_identity_example() {
        // X = I2, y = (3, 4): kappa = 0 returns y; kappa = 1 gives
        // (I + I) p = y, so p = y / 2
        let x = DMatrix::identity(2, 2);
        let p0 = ridge_fit(&x, &[3.0, 4.0], 0.0).unwrap();
        assert_abs_diff_eq!(p0[0], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p0[1], 4.0, epsilon = 1e-12);
        let p = ridge_fit(&x, &[3.0, 4.0], 1.0).unwrap();
        assert_abs_diff_eq!(p[0], 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(p[1], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn growing_ridge_weight_shrinks_the_solution_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = DMatrix::from_fn(25, 8, |_, _| rng.gen_range(-1.0..1.0));
        let y: Vec<f64> = (0..25).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let mut last = f64::INFINITY;
        for &kappa in &[0.0, 1.0, 1e3, 1e6, 1e9] {
            let p = ridge_fit(&x, &y, kappa).unwrap();
            let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(norm < last, "norm {norm} did not shrink at kappa {kappa}");
            last = norm;
        }
        assert!(last < 1e-6, "kappa 1e9 should drive the norm toward zero");
    }

    #[test]
    fn single_sample_order_one_design_is_two_constant_terms() {
        let ts = toy_training_set(1, |_| 0.0);
        let spec: BasisSpec = "sh:1".parse().unwrap();
        let x = build_design_matrix(&ts, &spec).unwrap();
        assert_eq!((x.nrows(), x.ncols()), (1, 2));
        assert_abs_diff_eq!(x[(0, 0)], 0.28209479177387814, epsilon = 1e-14);
        assert_abs_diff_eq!(x[(0, 1)], 0.28209479177387814, epsilon = 1e-14);
    }

    #[test]
    fn swapping_platform_roles_swaps_the_column_blocks() {
        let ts = toy_training_set(6, |_| 0.0);
        let swapped_samples: Vec<MatchedSample> = ts
            .samples()
            .iter()
            .map(|s| MatchedSample {
                t: s.t,
                obs: crate::geometry::JointObservation {
                    dir_b_in_a: s.obs.dir_a_in_b,
                    dir_a_in_b: s.obs.dir_b_in_a,
                    distance: s.obs.distance,
                },
                p_tx_dbm: s.p_tx_dbm,
                p_rx_dbm: s.p_rx_dbm,
            })
            .collect();
        let swapped = TrainingSet::new(swapped_samples, ts.wavelength(), "b", "a").unwrap();
        let spec: BasisSpec = "sh:3".parse().unwrap();
        let x = build_design_matrix(&ts, &spec).unwrap();
        let xs = build_design_matrix(&swapped, &spec).unwrap();
        let dim = spec.dimension();
        for i in 0..6 {
            for j in 0..dim {
                assert_eq!(x[(i, j)], xs[(i, dim + j)]);
                assert_eq!(x[(i, dim + j)], xs[(i, j)]);
            }
        }
    }

    #[test]
    fn residual_target_arithmetic_example() {
        // p_rx = -40 dBm, p_tx = 20 dBm, path loss at (0.125 m, 10 m) is
        // about -60.046 dB, leaving roughly 0.046 dB of joint gain
        let a = FullPose::level(Vec3::new(0.0, 0.0, 20.0), 0.0);
        let b = FullPose::level(Vec3::new(10.0, 0.0, 20.0), 0.0);
        let obs = joint_observation(&a, &b).unwrap();
        let ts = TrainingSet::new(
            vec![MatchedSample {
                t: 0.0,
                obs,
                p_tx_dbm: 20.0,
                p_rx_dbm: -40.0,
            }],
            0.125,
            "a",
            "b",
        )
        .unwrap();
        let y = residual_targets(&ts).unwrap();
        assert_abs_diff_eq!(y[0], 0.045997020280797, epsilon = 1e-12);

        // shifting both powers by the same constant leaves the target alone
        let shifted = TrainingSet::new(
            vec![MatchedSample {
                t: 0.0,
                obs,
                p_tx_dbm: 27.5,
                p_rx_dbm: -32.5,
            }],
            0.125,
            "a",
            "b",
        )
        .unwrap();
        assert_abs_diff_eq!(
            residual_targets(&shifted).unwrap()[0],
            y[0],
            epsilon = 1e-12
        );
    }

    #[test]
    fn zero_model_predicts_transmit_power_plus_path_loss() {
        let spec: BasisSpec = "sh:2".parse().unwrap();
        let model = DecoupledModel {
            spec: spec.clone(),
            kappa: 50.0,
            wavelength: 0.125,
            a_id: "a".into(),
            b_id: "b".into(),
            phi: vec![0.0; spec.dimension()],
            psi: vec![0.0; spec.dimension()],
        };
        let a = FullPose::level(Vec3::new(0.0, 0.0, 20.0), 0.3);
        let b = FullPose::level(Vec3::new(10.0, 0.0, 20.0), -0.4);
        let obs = joint_observation(&a, &b).unwrap();
        let pl = path_loss_db(0.125, obs.distance).unwrap();
        assert_abs_diff_eq!(
            model.predict_rx(&obs, 20.0).unwrap(),
            20.0 + pl,
            epsilon = 1e-12
        );
        // unit slope in transmit power
        let d = model.predict_rx(&obs, 21.0).unwrap() - model.predict_rx(&obs, 20.0).unwrap();
        assert_abs_diff_eq!(d, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn heavier_ridge_weight_costs_accuracy_on_realizable_data() {
        let ts = toy_training_set(120, |i| (i as f64 * 0.23).sin() * 4.0);
        let spec: BasisSpec = "sh:3".parse().unwrap();
        let rmse = |kappa: f64| {
            let m = fit(&ts, &spec, kappa).unwrap();
            let y = residual_targets(&ts).unwrap();
            let sq: f64 = ts
                .samples()
                .iter()
                .zip(&y)
                .map(|(s, yi)| (yi - m.predict_gain(&s.obs)).powi(2))
                .sum();
            (sq / ts.len() as f64).sqrt()
        };
        assert!(rmse(50.0) > rmse(1e-9));
    }

    /// Independent route: the ridge minimizer is the least-squares solution
    /// of the augmented system [X; sqrt(kappa) I] p = [y; 0], computed here
    /// with a pseudo-inverse.
    fn ridge_oracle(x: &DMatrix<f64>, y: &[f64], kappa: f64) -> Vec<f64> {
        let (n, p) = (x.nrows(), x.ncols());
        let mut aug = DMatrix::zeros(n + p, p);
        aug.view_mut((0, 0), (n, p)).copy_from(x);
        for j in 0..p {
            aug[(n + j, j)] = kappa.sqrt();
        }
        let mut rhs = DVector::zeros(n + p);
        for (i, &v) in y.iter().enumerate() {
            rhs[i] = v;
        }
        let pinv = aug.pseudo_inverse(1e-13).unwrap();
        (pinv * rhs).as_slice().to_vec()
    }

    #[test]
    fn agrees_with_augmented_pseudo_inverse_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..20 {
            let n = rng.gen_range(5..=50);
            let p = rng.gen_range(1..=20.min(n));
            let x = DMatrix::from_fn(n, p, |_, _| rng.gen_range(-2.0..2.0));
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
            for &kappa in &[0.1, 1.0, 50.0] {
                let got = ridge_fit(&x, &y, kappa).unwrap();
                let want = ridge_oracle(&x, &y, kappa);
                for (g, w) in got.iter().zip(&want) {
                    assert!(
                        (g - w).abs() < 1e-8,
                        "trial {trial} kappa {kappa}: {g} vs oracle {w}"
                    );
                }
            }
        }
    }

    #[test]
    fn unregularized_full_rank_residual_is_orthogonal_to_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = DMatrix::from_fn(30, 6, |_, _| rng.gen_range(-1.0..1.0));
        let y: Vec<f64> = (0..30).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let p = ridge_fit(&x, &y, 0.0).unwrap();
        let r = DVector::from_column_slice(&y) - &x * DVector::from_column_slice(&p);
        let xtr = x.tr_mul(&r);
        let scale = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in xtr.iter() {
            assert!(v.abs() < 1e-8 * scale.max(1.0), "X'r entry {v}");
        }
    }

    #[test]
    fn unregularized_rank_deficiency_is_an_error() {
        // second column duplicates the first
        let x = DMatrix::from_fn(10, 2, |i, _| (i as f64 * 0.3).sin());
        let y = vec![1.0; 10];
        let err = ridge_fit(&x, &y, 0.0).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("rank deficient"), "unexpected message: {msg}");
        // the same system solves fine with any positive weight
        assert!(ridge_fit(&x, &y, 50.0).is_ok());
    }

    #[test]
    fn invalid_ridge_arguments_are_rejected() {
        let x = DMatrix::identity(3, 3);
        assert!(matches!(
            ridge_fit(&x, &[1.0, 2.0, 3.0], -1.0),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            ridge_fit(&x, &[1.0, 2.0, 3.0], f64::NAN),
            Err(Error::Config(_))
        ));
        assert!(ridge_fit(&x, &[1.0, 2.0], 1.0).is_err()); // length mismatch
        assert!(ridge_fit(&x, &[1.0, f64::INFINITY, 0.0], 1.0).is_err());
    }

    #[test]
    fn pure_constant_joint_gain_splits_evenly_across_dc_terms() {
        let ts = toy_training_set(60, |_| 5.0);
        let spec: BasisSpec = "sh:2".parse().unwrap();
        let model = fit(&ts, &spec, 50.0).unwrap();
        assert_abs_diff_eq!(model.phi[0], model.psi[0], epsilon = 1e-9);

        // with a vanishing ridge weight the reconstruction is essentially
        // exact everywhere the data looked
        let tight = fit(&ts, &spec, 1e-9).unwrap();
        for s in ts.samples() {
            let rx = tight.predict_rx(&s.obs, s.p_tx_dbm).unwrap();
            assert_abs_diff_eq!(rx, s.p_rx_dbm, epsilon = 1e-6);
        }
    }

    #[test]
    fn predictions_are_invariant_under_constant_transfer() {
        let ts = toy_training_set(50, |i| (i as f64 * 0.4).sin());
        let spec: BasisSpec = "sh:3".parse().unwrap();
        let model = fit(&ts, &spec, 50.0).unwrap();
        let mut shifted = model.clone();
        // move 1 dB of constant gain from pattern b to pattern a
        let y00 = 0.28209479177387814;
        shifted.phi[0] += 1.0 / y00;
        shifted.psi[0] -= 1.0 / y00;
        for s in ts.samples() {
            let p0 = model.predict_rx(&s.obs, s.p_tx_dbm).unwrap();
            let p1 = shifted.predict_rx(&s.obs, s.p_tx_dbm).unwrap();
            assert_abs_diff_eq!(p0, p1, epsilon = 1e-9);
        }
    }

    #[test]
    fn fit_is_bit_deterministic() {
        let ts = toy_training_set(80, |i| (i as f64 * 0.13).cos() * 3.0);
        let spec: BasisSpec = "sh:4".parse().unwrap();
        let m1 = fit(&ts, &spec, 50.0).unwrap();
        let m2 = fit(&ts, &spec, 50.0).unwrap();
        assert!(m1
            .phi
            .iter()
            .chain(&m1.psi)
            .zip(m2.phi.iter().chain(&m2.psi))
            .all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn training_set_validation() {
        assert!(TrainingSet::new(vec![], 0.125, "a", "b").is_err());
        let ts = toy_training_set(3, |_| 0.0);
        let mut bad = ts.samples().to_vec();
        bad[1].p_rx_dbm = f64::NAN;
        assert!(TrainingSet::new(bad, 0.125, "a", "b").is_err());
        assert!(TrainingSet::new(ts.samples().to_vec(), -1.0, "a", "b").is_err());
    }

    #[test]
    fn subset_picks_by_index() {
        let ts = toy_training_set(10, |i| i as f64);
        let sub = ts.subset(&[2, 5, 7]).unwrap();
        assert_eq!(sub.len(), 3);
        assert_eq!(sub.samples()[1].t, ts.samples()[5].t);
        assert!(ts.subset(&[10]).is_err());
    }
}
