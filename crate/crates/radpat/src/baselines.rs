//! Reference regressors that bound achievable error but cannot decouple.
//!
//! Both baselines predict the joint gain directly from the observed
//! variables, so neither can say anything about an individual antenna;
//! they deliberately expose no per-platform gain query. The mean model
//! is the error upper bound any direction-aware method must beat; k-NN
//! is a strong non-parametric reference on densely sampled geometry.

use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, JointObservation};
use crate::learning::{residual_targets, TrainingSet};

/// How a mutual observation is embedded for nearest-neighbour search.
///
/// The observed variables are five numbers: four body-frame angles and
/// the separation. Raw angles make Euclidean distance lie near the
/// azimuth seam (+pi and -pi are the same direction but maximally far
/// as numbers), so the default maps each angle to its (sin, cos) pair.
/// The raw mode is kept for comparison experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FeatureMode {
    #[default]
    Embedded,
    RawAngles,
}

impl FeatureMode {
    pub fn feature_len(self) -> usize {
        match self {
            FeatureMode::Embedded => 9,
            FeatureMode::RawAngles => 5,
        }
    }
}

/// Writes the feature vector of one observation. `d_scale` is the
/// distance normalizer (training-set standard deviation of separations).
pub fn embed_into(obs: &JointObservation, mode: FeatureMode, d_scale: f64, out: &mut [f64]) {
    debug_assert_eq!(out.len(), mode.feature_len());
    let angles = [
        obs.dir_b_in_a.azimuth(),
        obs.dir_b_in_a.inclination(),
        obs.dir_a_in_b.azimuth(),
        obs.dir_a_in_b.inclination(),
    ];
    match mode {
        FeatureMode::Embedded => {
            for (k, a) in angles.iter().enumerate() {
                out[2 * k] = a.sin();
                out[2 * k + 1] = a.cos();
            }
            out[8] = obs.distance / d_scale;
        }
        FeatureMode::RawAngles => {
            out[..4].copy_from_slice(&angles);
            out[4] = obs.distance / d_scale;
        }
    }
}

/// Population standard deviation of the training separations, used to put
/// the distance feature on an angle-like scale. Degenerate spreads (all
/// separations equal, as on the calibration trajectory) fall back to 1
/// so the feature stays finite.
pub fn distance_scale(ts: &TrainingSet) -> f64 {
    let n = ts.len() as f64;
    let mean = ts.samples().iter().map(|s| s.obs.distance).sum::<f64>() / n;
    let var = ts
        .samples()
        .iter()
        .map(|s| (s.obs.distance - mean).powi(2))
        .sum::<f64>()
        / n;
    let std = var.sqrt();
    if std < 1e-12 {
        1.0
    } else {
        std
    }
}

/// Predicts every query with the training mean of the joint gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanModel {
    mu: f64,
}

impl MeanModel {
    pub fn fit(ts: &TrainingSet) -> Result<MeanModel> {
        let y = residual_targets(ts)?;
        let mu = y.iter().sum::<f64>() / y.len() as f64;
        if !mu.is_finite() {
            return Err(Error::numeric("mean of joint-gain targets is not finite"));
        }
        Ok(MeanModel { mu })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// The prediction ignores the query by construction.
    pub fn predict_gain(&self, _obs: &JointObservation) -> f64 {
        self.mu
    }
}

/// Inverse-distance-weighted k-nearest-neighbour regression over the
/// embedded observation features.
#[derive(Debug, Clone)]
pub struct KnnModel {
    k: usize,
    mode: FeatureMode,
    d_scale: f64,
    n_features: usize,
    /// Row-major n x n_features feature table.
    features: Vec<f64>,
    targets: Vec<f64>,
}

impl KnnModel {
    pub fn fit(ts: &TrainingSet, k: usize, mode: FeatureMode) -> Result<KnnModel> {
        if k == 0 {
            return Err(Error::config("k must be at least 1"));
        }
        if k > ts.len() {
            return Err(Error::config(format!(
                "k = {k} exceeds the {} training samples",
                ts.len()
            )));
        }
        let d_scale = distance_scale(ts);
        let n_features = mode.feature_len();
        let mut features = vec![0.0; ts.len() * n_features];
        for (row, s) in features.chunks_exact_mut(n_features).zip(ts.samples()) {
            embed_into(&s.obs, mode, d_scale, row);
        }
        Ok(KnnModel {
            k,
            mode,
            d_scale,
            n_features,
            features,
            targets: residual_targets(ts)?,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Inverse-distance-weighted mean of the k nearest training targets.
    /// A query at exactly zero feature distance returns that training
    /// target directly (lowest index on ties).
    pub fn predict_gain(&self, obs: &JointObservation) -> f64 {
        let mut q = vec![0.0; self.n_features];
        embed_into(obs, self.mode, self.d_scale, &mut q);
        let mut ranked: Vec<(f64, usize)> = self
            .features
            .chunks_exact(self.n_features)
            .enumerate()
            .map(|(i, row)| {
                let d2: f64 = row.iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum();
                (d2.sqrt(), i)
            })
            .collect();
        ranked.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite feature distances"));
        let nearest = &ranked[..self.k];
        if nearest[0].0 == 0.0 {
            return self.targets[nearest[0].1];
        }
        let mut num = 0.0;
        let mut den = 0.0;
        for &(d, i) in nearest {
            let w = 1.0 / d;
            num += w * self.targets[i];
            den += w;
        }
        num / den
    }
}

/// Shortest-arc angular differences (in degrees) between a query
/// observation and another one, per angle feature. Used by the local
/// noise analysis to report neighborhood spread.
pub fn angle_spread_deg(a: &JointObservation, b: &JointObservation) -> f64 {
    let pairs = [
        (a.dir_b_in_a.azimuth(), b.dir_b_in_a.azimuth()),
        (a.dir_b_in_a.inclination(), b.dir_b_in_a.inclination()),
        (a.dir_a_in_b.azimuth(), b.dir_a_in_b.azimuth()),
        (a.dir_a_in_b.inclination(), b.dir_a_in_b.inclination()),
    ];
    pairs
        .iter()
        .map(|(x, y)| normalize_angle(x - y).abs())
        .fold(0.0, f64::max)
        .to_degrees()
}
