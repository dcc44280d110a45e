//! Cross-validated benchmarking of pattern models and baselines.
//!
//! The harness repeats a seeded random train/test split, fits every
//! requested method on the training part, and scores predictions of the
//! joint gain on the held-out part. Reported metrics are means over the
//! splits; the JSON report keeps the per-split sequences.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::{angle_spread_deg, distance_scale, embed_into, FeatureMode, KnnModel, MeanModel};
use crate::error::{Error, Result};
use crate::learning::{build_design_matrix, residual_targets, ridge_fit, DecoupledModel, TrainingSet};
use crate::models::BasisSpec;

/// Repeated random-split cross-validation settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossValConfig {
    pub splits: usize,
    pub test_fraction: f64,
    pub seed: u64,
}

impl Default for CrossValConfig {
    fn default() -> Self {
        CrossValConfig {
            splits: 30,
            test_fraction: 0.2,
            seed: 0,
        }
    }
}

impl CrossValConfig {
    pub fn validate(&self) -> Result<()> {
        if self.splits == 0 {
            return Err(Error::config("number of splits must be at least 1"));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::config(format!(
                "test fraction must lie strictly between 0 and 1, got {}",
                self.test_fraction
            )));
        }
        Ok(())
    }
}

/// Seeded disjoint-exhaustive train/test split of `0..n`.
///
/// The permutation depends only on (seed, split_index), so partitions
/// reproduce across runs and machines; indices come back sorted. The
/// test part holds round(n * test_fraction) elements.
pub fn split_indices(
    n: usize,
    cfg: &CrossValConfig,
    split_index: usize,
) -> Result<(Vec<usize>, Vec<usize>)> {
    cfg.validate()?;
    if n < 2 {
        return Err(Error::config(format!(
            "need at least 2 samples to split, got {n}"
        )));
    }
    let n_test = (n as f64 * cfg.test_fraction).round() as usize;
    if n_test == 0 || n_test >= n {
        return Err(Error::config(format!(
            "test fraction {} leaves an empty train or test side for n = {n}",
            cfg.test_fraction
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(split_index as u64);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut test = perm[..n_test].to_vec();
    let mut train = perm[n_test..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    Ok((train, test))
}

/// Root-mean-square of the residuals.
pub fn rmse(residuals: &[f64]) -> Result<f64> {
    if residuals.is_empty() {
        return Err(Error::numeric("rmse of an empty residual set"));
    }
    if residuals.iter().any(|r| !r.is_finite()) {
        return Err(Error::numeric("non-finite residual"));
    }
    Ok((residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64).sqrt())
}

/// Nearest-rank 95th percentile of the absolute residuals (no
/// interpolation, so results reproduce exactly).
pub fn q95(residuals: &[f64]) -> Result<f64> {
    if residuals.is_empty() {
        return Err(Error::numeric("q95 of an empty residual set"));
    }
    if residuals.iter().any(|r| !r.is_finite()) {
        return Err(Error::numeric("non-finite residual"));
    }
    let mut abs: Vec<f64> = residuals.iter().map(|r| r.abs()).collect();
    abs.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite"));
    let rank = (0.95 * abs.len() as f64).ceil() as usize;
    Ok(abs[rank.clamp(1, abs.len()) - 1])
}

/// Akaike information criterion in the Gaussian profile form
/// 2k + n ln(rss / n), with k the number of fitted parameters.
pub fn aic(n: usize, k: usize, rss: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::numeric("aic over zero residuals"));
    }
    if !rss.is_finite() || rss <= 0.0 {
        return Err(Error::numeric(format!(
            "aic needs a positive finite residual sum of squares, got {rss}"
        )));
    }
    Ok(2.0 * k as f64 + n as f64 * (rss / n as f64).ln())
}

/// One benchmarkable method: a decoupled basis fit or a baseline.
#[derive(Debug, Clone, PartialEq)]
pub enum MethodSpec {
    Mean,
    Knn { k: usize },
    Decoupled(BasisSpec),
}

impl std::fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MethodSpec::Mean => write!(f, "mean"),
            MethodSpec::Knn { k } => write!(f, "knn:{k}"),
            MethodSpec::Decoupled(spec) => write!(f, "{spec}"),
        }
    }
}

impl std::str::FromStr for MethodSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "mean" {
            return Ok(MethodSpec::Mean);
        }
        if let Some(rest) = s.strip_prefix("knn:") {
            let k = rest.parse::<usize>().map_err(|_| {
                Error::config(format!("invalid neighbour count in '{s}'; expected knn:K"))
            })?;
            return Ok(MethodSpec::Knn { k });
        }
        Ok(MethodSpec::Decoupled(s.parse::<BasisSpec>()?))
    }
}

/// Parses a comma-separated method list such as `mean,sh:14,knn:10`.
pub fn parse_method_list(s: &str) -> Result<Vec<MethodSpec>> {
    let methods = s
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(str::parse)
        .collect::<Result<Vec<MethodSpec>>>()?;
    if methods.is_empty() {
        return Err(Error::config("empty method list"));
    }
    Ok(methods)
}

/// Per-split metric sequences, index-aligned with the split number.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SplitMetrics {
    pub rmse_db: Vec<f64>,
    pub q95_db: Vec<f64>,
    pub aic: Vec<f64>,
    /// Seconds spent building features / the design matrix.
    pub t_design_s: Vec<f64>,
    /// Seconds spent in the solver or model construction proper.
    pub t_solve_s: Vec<f64>,
}

/// Aggregated scores of one method over all splits.
///
/// `param_count` is the per-pattern coefficient count (what a single
/// antenna model stores); `aic_param_count` is the total number of fitted
/// free parameters, which is what enters the AIC penalty (both coefficient
/// blocks for decoupled fits, the stored sample count for k-NN).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub method: String,
    pub rmse_db: f64,
    pub param_count: usize,
    pub aic: f64,
    pub t_lin_s: f64,
    pub q95_db: f64,
    pub aic_param_count: usize,
    pub per_split: SplitMetrics,
}

/// A method's slot in the benchmark output: either a report or the error
/// that stopped it. Failures never abort the other methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodOutcome {
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<FitReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Benchmark provenance embedded in the JSON report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub splits: usize,
    pub test_fraction: f64,
    pub seed: u64,
    pub kappa: f64,
    pub n_samples: usize,
    pub aic_formula: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub config: BenchmarkConfig,
    pub outcomes: Vec<MethodOutcome>,
}

impl BenchmarkReport {
    /// The successful reports, in method order.
    pub fn reports(&self) -> impl Iterator<Item = &FitReport> {
        self.outcomes.iter().filter_map(|o| o.report.as_ref())
    }
}

struct SplitScore {
    rmse: f64,
    q95: f64,
    aic: f64,
    t_design: f64,
    t_solve: f64,
}

fn score_split(
    ts: &TrainingSet,
    method: &MethodSpec,
    kappa: f64,
    train_idx: &[usize],
    test_idx: &[usize],
) -> Result<SplitScore> {
    let train = ts.subset(train_idx)?;
    let test = ts.subset(test_idx)?;
    let y_test = residual_targets(&test)?;

    let (predict, t_design, t_solve): (Box<dyn Fn(usize) -> f64>, f64, f64) = match method {
        MethodSpec::Mean => {
            let t0 = Instant::now();
            let m = MeanModel::fit(&train)?;
            let t_solve = t0.elapsed().as_secs_f64();
            (
                Box::new(move |i| m.predict_gain(&test.samples()[i].obs)),
                0.0,
                t_solve,
            )
        }
        MethodSpec::Knn { k } => {
            let t0 = Instant::now();
            let m = KnnModel::fit(&train, *k, FeatureMode::Embedded)?;
            let t_design = t0.elapsed().as_secs_f64();
            let test2 = test.clone();
            (
                Box::new(move |i| m.predict_gain(&test2.samples()[i].obs)),
                t_design,
                0.0,
            )
        }
        MethodSpec::Decoupled(spec) => {
            let t0 = Instant::now();
            let x = build_design_matrix(&train, spec)?;
            let y = residual_targets(&train)?;
            let t_design = t0.elapsed().as_secs_f64();
            let t1 = Instant::now();
            let p = ridge_fit(&x, &y, kappa)?;
            let t_solve = t1.elapsed().as_secs_f64();
            let dim = spec.dimension();
            let m = DecoupledModel {
                spec: spec.clone(),
                kappa,
                wavelength: train.wavelength(),
                a_id: train.tx_id().to_string(),
                b_id: train.rx_id().to_string(),
                phi: p[..dim].to_vec(),
                psi: p[dim..].to_vec(),
            };
            let test2 = test.clone();
            (
                Box::new(move |i| m.predict_gain(&test2.samples()[i].obs)),
                t_design,
                t_solve,
            )
        }
    };

    let residuals: Vec<f64> = y_test
        .iter()
        .enumerate()
        .map(|(i, y)| y - predict(i))
        .collect();
    let rss: f64 = residuals.iter().map(|r| r * r).sum();
    let aic_k = match method {
        MethodSpec::Mean => 1,
        MethodSpec::Knn { .. } => train_idx.len(),
        MethodSpec::Decoupled(spec) => 2 * spec.dimension(),
    };
    Ok(SplitScore {
        rmse: rmse(&residuals)?,
        q95: q95(&residuals)?,
        aic: aic(residuals.len(), aic_k, rss)?,
        t_design,
        t_solve,
    })
}

/// Runs every method over the same sequence of seeded splits.
///
/// Output order follows the method list; a failing method is recorded
/// with its error message and does not stop the rest. `kappa` applies to
/// every decoupled basis fit.
pub fn benchmark(
    ts: &TrainingSet,
    methods: &[MethodSpec],
    cfg: &CrossValConfig,
    kappa: f64,
) -> Result<BenchmarkReport> {
    cfg.validate()?;
    if methods.is_empty() {
        return Err(Error::config("empty method list"));
    }
    let splits: Vec<(Vec<usize>, Vec<usize>)> = (0..cfg.splits)
        .map(|i| split_indices(ts.len(), cfg, i))
        .collect::<Result<_>>()?;

    let mut outcomes = Vec::with_capacity(methods.len());
    for method in methods {
        let label = method.to_string();
        let mut per = SplitMetrics::default();
        let mut failure: Option<String> = None;
        for (train_idx, test_idx) in &splits {
            match score_split(ts, method, kappa, train_idx, test_idx) {
                Ok(s) => {
                    per.rmse_db.push(s.rmse);
                    per.q95_db.push(s.q95);
                    per.aic.push(s.aic);
                    per.t_design_s.push(s.t_design);
                    per.t_solve_s.push(s.t_solve);
                }
                Err(e) => {
                    failure = Some(e.to_string());
                    break;
                }
            }
        }
        let outcome = match failure {
            Some(error) => {
                log::warn!("method {label} failed: {error}");
                MethodOutcome {
                    method: label,
                    report: None,
                    error: Some(error),
                }
            }
            None => {
                let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
                let n_train = splits[0].0.len();
                let (param_count, aic_param_count) = match method {
                    MethodSpec::Mean => (1, 1),
                    MethodSpec::Knn { .. } => (n_train, n_train),
                    MethodSpec::Decoupled(spec) => (spec.dimension(), 2 * spec.dimension()),
                };
                MethodOutcome {
                    method: label.clone(),
                    report: Some(FitReport {
                        method: label,
                        rmse_db: mean(&per.rmse_db),
                        param_count,
                        aic: mean(&per.aic),
                        t_lin_s: mean(&per.t_design_s) + mean(&per.t_solve_s),
                        q95_db: mean(&per.q95_db),
                        aic_param_count,
                        per_split: per,
                    }),
                    error: None,
                }
            }
        };
        outcomes.push(outcome);
    }

    Ok(BenchmarkReport {
        config: BenchmarkConfig {
            splits: cfg.splits,
            test_fraction: cfg.test_fraction,
            seed: cfg.seed,
            kappa,
            n_samples: ts.len(),
            aic_formula: "2k + n*ln(rss/n), k = total fitted parameters, test residuals".into(),
        },
        outcomes,
    })
}

/// Neighborhood statistics of one sample: how far apart the geometry of
/// its nearest neighbours is, and how much the received power varies
/// among them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoisePoint {
    pub t: f64,
    pub max_spread_deg: f64,
    pub rssi_std_db: f64,
}

/// For every sample, finds its k nearest neighbours in the embedded
/// observation-feature space and reports the largest shortest-arc angle
/// difference to any of them (degrees) together with the sample standard
/// deviation of the neighbours' received power (dB).
///
/// Tight neighborhoods on a noiseless dataset give zero spread and zero
/// std; with measurement noise the std estimates the noise level.
pub fn local_noise_analysis(ts: &TrainingSet, k: usize) -> Result<Vec<NoisePoint>> {
    if k == 0 {
        return Err(Error::config("neighbour count must be at least 1"));
    }
    if ts.len() <= k {
        return Err(Error::config(format!(
            "need more than k = {k} samples, got {}",
            ts.len()
        )));
    }
    let mode = FeatureMode::Embedded;
    let d_scale = distance_scale(ts);
    let nf = mode.feature_len();
    let mut feats = vec![0.0; ts.len() * nf];
    for (row, s) in feats.chunks_exact_mut(nf).zip(ts.samples()) {
        embed_into(&s.obs, mode, d_scale, row);
    }

    let mut out = Vec::with_capacity(ts.len());
    let mut ranked: Vec<(f64, usize)> = Vec::with_capacity(ts.len() - 1);
    for (i, si) in ts.samples().iter().enumerate() {
        let qi = &feats[i * nf..(i + 1) * nf];
        ranked.clear();
        for (j, row) in feats.chunks_exact(nf).enumerate() {
            if j == i {
                continue;
            }
            let d2: f64 = row.iter().zip(qi).map(|(a, b)| (a - b) * (a - b)).sum();
            ranked.push((d2, j));
        }
        ranked.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite"));
        let neighbours = &ranked[..k];

        let mut spread = 0.0_f64;
        let mut mean = 0.0;
        for &(_, j) in neighbours {
            let sj = &ts.samples()[j];
            spread = spread.max(angle_spread_deg(&si.obs, &sj.obs));
            mean += sj.p_rx_dbm;
        }
        mean /= k as f64;
        let std = if k == 1 {
            0.0
        } else {
            let var = neighbours
                .iter()
                .map(|&(_, j)| (ts.samples()[j].p_rx_dbm - mean).powi(2))
                .sum::<f64>()
                / (k - 1) as f64;
            var.sqrt()
        };
        out.push(NoisePoint {
            t: si.t,
            max_spread_deg: spread,
            rssi_std_db: std,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{path_loss_db, Direction, JointObservation};
    use crate::learning::MatchedSample;
    use approx::assert_abs_diff_eq;

    fn obs(a_az: f64, a_in: f64, b_az: f64, b_in: f64, d: f64) -> JointObservation {
        JointObservation {
            dir_b_in_a: Direction::new(a_az, a_in),
            dir_a_in_b: Direction::new(b_az, b_in),
            distance: d,
        }
    }

    /// Deterministic toy set: spread-out directions, pseudo-noisy targets.
    fn toy_set(n: usize) -> TrainingSet {
        let samples: Vec<MatchedSample> = (0..n)
            .map(|i| {
                let x = i as f64;
                let o = obs(
                    crate::geometry::normalize_angle(x * 0.7),
                    (x * 0.31).sin() * 1.2,
                    crate::geometry::normalize_angle(-x * 0.43),
                    (x * 0.17).cos() * 1.1,
                    10.0,
                );
                let gain = (x * 0.2).sin() * 3.0 + (x * 1.7).sin() * 0.8;
                MatchedSample {
                    t: x * 0.01,
                    obs: o,
                    p_tx_dbm: 20.0,
                    p_rx_dbm: 20.0 + gain + path_loss_db(0.125, 10.0).unwrap(),
                }
            })
            .collect();
        TrainingSet::new(samples, 0.125, "a", "b").unwrap()
    }

    #[test]
    fn split_sizes_and_partition() {
        let cfg = CrossValConfig {
            splits: 5,
            test_fraction: 0.2,
            seed: 9,
        };
        let (train, test) = split_indices(10, &cfg, 0).unwrap();
        assert_eq!(test.len(), 2);
        assert_eq!(train.len(), 8);
        let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn splits_are_seed_deterministic_and_index_distinct() {
        let cfg = CrossValConfig {
            splits: 5,
            test_fraction: 0.25,
            seed: 42,
        };
        assert_eq!(
            split_indices(40, &cfg, 3).unwrap(),
            split_indices(40, &cfg, 3).unwrap()
        );
        let first = split_indices(40, &cfg, 0).unwrap();
        assert!(
            (1..5).any(|i| split_indices(40, &cfg, i).unwrap() != first),
            "all split indices produced the same partition"
        );
    }

    #[test]
    fn degenerate_split_requests_are_rejected() {
        let cfg = CrossValConfig {
            splits: 1,
            test_fraction: 0.2,
            seed: 0,
        };
        assert!(split_indices(1, &cfg, 0).is_err());
        // round(2 * 0.2) = 0 test samples
        assert!(split_indices(2, &cfg, 0).is_err());
        let bad = CrossValConfig {
            splits: 0,
            ..cfg
        };
        assert!(split_indices(10, &bad, 0).is_err());
    }

    #[test]
    fn rmse_and_q95_examples() {
        assert_abs_diff_eq!(rmse(&[1.0, -1.0]).unwrap(), 1.0, epsilon = 1e-15);
        let v: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        assert_eq!(q95(&v).unwrap(), 95.0);
        assert!(rmse(&[]).is_err());
        assert!(q95(&[f64::NAN]).is_err());
        // q95 works on magnitudes regardless of sign
        assert_eq!(q95(&[-3.0, 1.0, 2.0]).unwrap(), 3.0);
    }

    #[test]
    fn q95_grows_when_a_larger_outlier_arrives() {
        let mut v: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin() * 5.0).collect();
        let before = q95(&v).unwrap();
        let worst = v.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
        v.push(worst + 1.0);
        assert!(q95(&v).unwrap() >= before);
    }

    #[test]
    fn aic_formula_and_monotonicity() {
        let base = aic(50, 10, 25.0).unwrap();
        assert_abs_diff_eq!(
            base,
            20.0 + 50.0 * (25.0_f64 / 50.0).ln(),
            epsilon = 1e-12
        );
        // one extra parameter at unchanged rss costs exactly 2
        assert_abs_diff_eq!(aic(50, 11, 25.0).unwrap() - base, 2.0, epsilon = 1e-12);
        // more rss at fixed k is worse
        assert!(aic(50, 10, 30.0).unwrap() > base);
        assert!(aic(0, 1, 1.0).is_err());
        assert!(aic(10, 1, 0.0).is_err());
    }

    #[test]
    fn method_spec_grammar() {
        assert_eq!("mean".parse::<MethodSpec>().unwrap(), MethodSpec::Mean);
        assert_eq!(
            "knn:10".parse::<MethodSpec>().unwrap(),
            MethodSpec::Knn { k: 10 }
        );
        assert!(matches!(
            "sh:14".parse::<MethodSpec>().unwrap(),
            MethodSpec::Decoupled(_)
        ));
        assert!("knn:x".parse::<MethodSpec>().is_err());
        assert!("nope:3".parse::<MethodSpec>().is_err());
        let list = parse_method_list("mean, sh:4 ,knn:10").unwrap();
        assert_eq!(list.len(), 3);
        assert_eq!(list[2].to_string(), "knn:10");
        assert!(parse_method_list(" , ").is_err());
    }

    #[test]
    fn mean_rmse_equals_test_std_around_training_mean() {
        let ts = toy_set(60);
        let cfg = CrossValConfig {
            splits: 3,
            test_fraction: 0.25,
            seed: 5,
        };
        for i in 0..cfg.splits {
            let (train_idx, test_idx) = split_indices(ts.len(), &cfg, i).unwrap();
            let train = ts.subset(&train_idx).unwrap();
            let test = ts.subset(&test_idx).unwrap();
            let mu = MeanModel::fit(&train).unwrap().mu();
            let y = residual_targets(&test).unwrap();
            let res: Vec<f64> = y.iter().map(|v| v - mu).collect();
            let got = rmse(&res).unwrap();
            // second moment form of the same quantity, different fp path
            let m1 = y.iter().sum::<f64>() / y.len() as f64;
            let m2 = y.iter().map(|v| v * v).sum::<f64>() / y.len() as f64;
            let want = (m2 - 2.0 * mu * m1 + mu * mu).sqrt();
            assert_abs_diff_eq!(got, want, epsilon = 1e-9);
        }
    }

    #[test]
    fn benchmark_scores_every_method_in_order() {
        let ts = toy_set(80);
        let methods = parse_method_list("mean,sh:2,knn:5").unwrap();
        let cfg = CrossValConfig {
            splits: 4,
            test_fraction: 0.2,
            seed: 1,
        };
        let report = benchmark(&ts, &methods, &cfg, 50.0).unwrap();
        assert_eq!(report.outcomes.len(), 3);
        assert_eq!(report.outcomes[0].method, "mean");
        assert_eq!(report.outcomes[1].method, "sh:2");
        assert_eq!(report.outcomes[2].method, "knn:5");
        let mean_report = report.outcomes[0].report.as_ref().unwrap();
        assert_eq!(mean_report.param_count, 1);
        assert_eq!(mean_report.per_split.rmse_db.len(), 4);
        let sh = report.outcomes[1].report.as_ref().unwrap();
        assert_eq!(sh.param_count, 4);
        assert_eq!(sh.aic_param_count, 8);
        let knn = report.outcomes[2].report.as_ref().unwrap();
        assert_eq!(knn.param_count, 64); // stored training samples
    }

    #[test]
    fn benchmark_records_failures_without_aborting() {
        let ts = toy_set(30);
        // k exceeds every possible training-side size
        let methods = parse_method_list("knn:400,mean").unwrap();
        let cfg = CrossValConfig {
            splits: 2,
            test_fraction: 0.2,
            seed: 1,
        };
        let report = benchmark(&ts, &methods, &cfg, 50.0).unwrap();
        assert!(report.outcomes[0].report.is_none());
        assert!(report.outcomes[0].error.is_some());
        assert!(report.outcomes[1].report.is_some());
        assert_eq!(report.reports().count(), 1);
    }

    #[test]
    fn benchmark_metrics_are_deterministic() {
        let ts = toy_set(50);
        let methods = parse_method_list("mean,sh:2").unwrap();
        let cfg = CrossValConfig {
            splits: 3,
            test_fraction: 0.2,
            seed: 77,
        };
        let a = benchmark(&ts, &methods, &cfg, 50.0).unwrap();
        let b = benchmark(&ts, &methods, &cfg, 50.0).unwrap();
        for (oa, ob) in a.outcomes.iter().zip(&b.outcomes) {
            let (ra, rb) = (oa.report.as_ref().unwrap(), ob.report.as_ref().unwrap());
            assert_eq!(ra.rmse_db.to_bits(), rb.rmse_db.to_bits());
            assert_eq!(ra.q95_db.to_bits(), rb.q95_db.to_bits());
            assert_eq!(ra.aic.to_bits(), rb.aic.to_bits());
        }
    }

    #[test]
    fn noise_analysis_on_constant_power_is_zero_std() {
        let samples: Vec<MatchedSample> = (0..12)
            .map(|i| MatchedSample {
                t: i as f64,
                obs: obs((i as f64 * 0.5).sin(), 0.2, 0.3, -0.1, 10.0),
                p_tx_dbm: 20.0,
                p_rx_dbm: -40.0,
            })
            .collect();
        let ts = TrainingSet::new(samples, 0.125, "a", "b").unwrap();
        for p in local_noise_analysis(&ts, 5).unwrap() {
            assert_eq!(p.rssi_std_db, 0.0);
        }
    }

    #[test]
    fn noise_analysis_spread_is_zero_on_duplicated_cluster() {
        // identical geometry everywhere: every neighbourhood has zero spread
        let samples: Vec<MatchedSample> = (0..8)
            .map(|i| MatchedSample {
                t: i as f64,
                obs: obs(0.4, 0.1, -0.2, 0.3, 10.0),
                p_tx_dbm: 20.0,
                p_rx_dbm: -40.0 + (i as f64 * 0.9).sin(),
            })
            .collect();
        let ts = TrainingSet::new(samples, 0.125, "a", "b").unwrap();
        let pts = local_noise_analysis(&ts, 3).unwrap();
        assert_eq!(pts.len(), 8);
        for p in pts {
            assert_eq!(p.max_spread_deg, 0.0);
            assert!(p.rssi_std_db > 0.0); // power varies even though geometry is fixed
        }
    }

    #[test]
    fn noise_analysis_validates_k() {
        let ts = toy_set(6);
        assert!(local_noise_analysis(&ts, 0).is_err());
        assert!(local_noise_analysis(&ts, 6).is_err());
        assert_eq!(local_noise_analysis(&ts, 5).unwrap().len(), 6);
    }
}
