//! Synthetic calibration flights with known ground-truth patterns.
//!
//! Two platforms fly a vertical circle in the x = 0 plane, always
//! diametrically opposite, so their separation never changes while the
//! mutual directions sweep the sphere. One platform re-orients between
//! loops; the slow heading schedule is what exposes each antenna from
//! every azimuth. Received powers follow the free-space link budget plus
//! seeded Gaussian noise, so every recovery experiment has an exact
//! oracle to compare against.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dataio::{PoseLog, SignalLog, SignalRecord, TimedPose};
use crate::error::{Error, Result};
use crate::geometry::{joint_observation, normalize_angle, path_loss_db, Direction, FullPose, Vec3};
use crate::learning::{MatchedSample, TrainingSet};
use crate::models::{BasisSpec, PatternFunction};

/// Heading schedule of the two platforms during the calibration flight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HeadingMode {
    /// Platform a advances its heading by `heading_step` after every
    /// completed loop; platform b holds a constant heading.
    #[default]
    StepA,
    /// Mirror image: b steps, a holds.
    StepB,
    /// Both headings point at the circle center's horizontal position.
    /// On this trajectory that degenerates to two alternating values
    /// (and is undefined directly above or below the center, where it
    /// falls back to 0); kept for experimentation only.
    FaceCenter,
}

impl std::fmt::Display for HeadingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            HeadingMode::StepA => "step-a",
            HeadingMode::StepB => "step-b",
            HeadingMode::FaceCenter => "face-center",
        })
    }
}

impl std::str::FromStr for HeadingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "step-a" => Ok(HeadingMode::StepA),
            "step-b" => Ok(HeadingMode::StepB),
            "face-center" => Ok(HeadingMode::FaceCenter),
            _ => Err(Error::config(format!(
                "unknown heading mode '{s}'; expected step-a, step-b, or face-center"
            ))),
        }
    }
}

/// Calibration trajectory parameters.
///
/// The circle has the given diameter, lies in the x = 0 plane, and is
/// centered at altitude `center_altitude`. Each of `loops` loops is
/// sampled at `samples_per_loop` evenly spaced circle angles; timestamps
/// tick uniformly at `sample_rate_hz`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryConfig {
    pub diameter: f64,
    pub center_altitude: f64,
    pub loops: usize,
    pub samples_per_loop: usize,
    /// Heading increment applied between loops (radians).
    pub heading_step: f64,
    pub sample_rate_hz: f64,
    pub heading_mode: HeadingMode,
}

impl TrajectoryConfig {
    /// Configuration with the stated loop counts and all other fields at
    /// their defaults; the heading step divides the full circle evenly
    /// across the loops.
    pub fn with_loops(loops: usize, samples_per_loop: usize) -> Self {
        TrajectoryConfig {
            diameter: 10.0,
            center_altitude: 20.0,
            loops,
            samples_per_loop,
            heading_step: 2.0 * std::f64::consts::PI / loops.max(1) as f64,
            sample_rate_hz: 400.0,
            heading_mode: HeadingMode::StepA,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.diameter.is_finite() || self.diameter <= 0.0 {
            return Err(Error::config(format!(
                "circle diameter must be positive, got {}",
                self.diameter
            )));
        }
        if !self.center_altitude.is_finite() || self.center_altitude <= self.diameter / 2.0 {
            return Err(Error::config(format!(
                "center altitude {} must exceed the circle radius {} so the flight stays \
                 above ground",
                self.center_altitude,
                self.diameter / 2.0
            )));
        }
        if self.loops == 0 || self.samples_per_loop == 0 {
            return Err(Error::config("loops and samples per loop must be at least 1"));
        }
        if !self.heading_step.is_finite() {
            return Err(Error::config("heading step must be finite"));
        }
        if !self.sample_rate_hz.is_finite() || self.sample_rate_hz <= 0.0 {
            return Err(Error::config(format!(
                "sample rate must be positive, got {}",
                self.sample_rate_hz
            )));
        }
        Ok(())
    }
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        TrajectoryConfig::with_loops(24, 360)
    }
}

/// Both platforms' poses at one timestamp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosePair {
    pub t: f64,
    pub a: FullPose,
    pub b: FullPose,
}

/// Generates the calibration trajectory.
///
/// Platform a sits at circle angle theta, platform b diametrically
/// opposite, so the separation equals the diameter at every sample. In
/// the default heading mode a starts facing b (heading -pi/2, toward -y)
/// and turns by `heading_step` after each loop; b constantly faces a's
/// starting side (+y, heading +pi/2).
pub fn generate_trajectory(cfg: &TrajectoryConfig) -> Result<Vec<PosePair>> {
    cfg.validate()?;
    let r = cfg.diameter / 2.0;
    let z0 = cfg.center_altitude;
    let mut out = Vec::with_capacity(cfg.loops * cfg.samples_per_loop);
    for i in 0..cfg.loops {
        let step = i as f64 * cfg.heading_step;
        for j in 0..cfg.samples_per_loop {
            let g = i * cfg.samples_per_loop + j;
            let t = g as f64 / cfg.sample_rate_hz;
            let theta = 2.0 * std::f64::consts::PI * j as f64 / cfg.samples_per_loop as f64;
            let pa = Vec3::new(0.0, r * theta.cos(), z0 + r * theta.sin());
            let pb = Vec3::new(0.0, -r * theta.cos(), z0 - r * theta.sin());
            let (ha, hb) = match cfg.heading_mode {
                HeadingMode::StepA => (
                    normalize_angle(-std::f64::consts::FRAC_PI_2 + step),
                    std::f64::consts::FRAC_PI_2,
                ),
                HeadingMode::StepB => (
                    -std::f64::consts::FRAC_PI_2,
                    normalize_angle(std::f64::consts::FRAC_PI_2 + step),
                ),
                HeadingMode::FaceCenter => ((-pa.y).atan2(-pa.x), (-pb.y).atan2(-pb.x)),
            };
            out.push(PosePair {
                t,
                a: FullPose::level(pa, ha),
                b: FullPose::level(pb, hb),
            });
        }
    }
    Ok(out)
}

/// Ground-truth world description for RSSI synthesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthScene {
    pub pattern_a: PatternFunction,
    pub pattern_b: PatternFunction,
    pub p_tx_dbm: f64,
    pub wavelength: f64,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl GroundTruthScene {
    /// Scene with the given patterns and defaults everywhere else:
    /// 20 dBm transmit power, 0.125 m wavelength, 2.74 dB noise.
    pub fn new(pattern_a: PatternFunction, pattern_b: PatternFunction, seed: u64) -> Self {
        GroundTruthScene {
            pattern_a,
            pattern_b,
            p_tx_dbm: 20.0,
            wavelength: 0.125,
            noise_sigma: 2.74,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.wavelength.is_finite() || self.wavelength <= 0.0 {
            return Err(Error::config(format!(
                "wavelength must be positive, got {}",
                self.wavelength
            )));
        }
        if !self.noise_sigma.is_finite() || self.noise_sigma < 0.0 {
            return Err(Error::config(format!(
                "noise sigma must be non-negative, got {}",
                self.noise_sigma
            )));
        }
        if !self.p_tx_dbm.is_finite() {
            return Err(Error::config("transmit power must be finite"));
        }
        Ok(())
    }
}

/// A complete synthetic capture: the pose logs both platforms would have
/// recorded, the matched RSSI samples (direction a -> b), and the scene
/// that produced them.
#[derive(Debug, Clone)]
pub struct SyntheticDataset {
    pub pose_a: PoseLog,
    pub pose_b: PoseLog,
    pub training: TrainingSet,
    pub scene: GroundTruthScene,
}

impl SyntheticDataset {
    /// The samples as a signal log in the interchange schema.
    pub fn signal_log(&self) -> SignalLog {
        let records = self
            .training
            .samples()
            .iter()
            .map(|s| SignalRecord {
                t: s.t,
                tx: self.training.tx_id().to_string(),
                rx: self.training.rx_id().to_string(),
                p_tx_dbm: s.p_tx_dbm,
                p_rx_dbm: s.p_rx_dbm,
            })
            .collect();
        SignalLog::new(records).expect("synthetic records are valid by construction")
    }
}

/// The noise draw for one sample index. Each sample owns a counter-mode
/// RNG stream, so its noise depends only on (seed, index); samples can
/// be generated in any order or in parallel with identical results.
fn noise_at(seed: u64, index: u64, sigma: f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let z: f64 = StandardNormal.sample(&mut rng);
    sigma * z
}

/// Synthesizes received powers over a pose sequence.
///
/// Each sample's received power is the transmit power plus both
/// ground-truth gains at the mutual directions, plus free-space path
/// loss, plus N(0, noise_sigma) from a seeded per-sample stream. The
/// link direction is fixed a -> b; platform ids are "a" and "b".
/// Separations at or below twice the wavelength violate the far-field
/// assumption behind the link budget and are refused.
pub fn synthesize(poses: &[PosePair], scene: &GroundTruthScene) -> Result<SyntheticDataset> {
    scene.validate()?;
    if poses.is_empty() {
        return Err(Error::data("no poses to synthesize over"));
    }
    let mut samples = Vec::with_capacity(poses.len());
    let mut log_a = Vec::with_capacity(poses.len());
    let mut log_b = Vec::with_capacity(poses.len());
    for (g, pair) in poses.iter().enumerate() {
        let obs = joint_observation(&pair.a, &pair.b)?;
        if obs.distance <= 2.0 * scene.wavelength {
            return Err(Error::data(format!(
                "far-field assumption violated at t = {}: separation {} m is not above \
                 twice the wavelength ({} m)",
                pair.t,
                obs.distance,
                2.0 * scene.wavelength
            )));
        }
        let gain = scene.pattern_a.eval(obs.dir_b_in_a) + scene.pattern_b.eval(obs.dir_a_in_b);
        let pl = path_loss_db(scene.wavelength, obs.distance)?;
        let p_rx = scene.p_tx_dbm + gain + pl + noise_at(scene.seed, g as u64, scene.noise_sigma);
        samples.push(MatchedSample {
            t: pair.t,
            obs,
            p_tx_dbm: scene.p_tx_dbm,
            p_rx_dbm: p_rx,
        });
        log_a.push(TimedPose {
            t: pair.t,
            pose: pair.a,
        });
        log_b.push(TimedPose {
            t: pair.t,
            pose: pair.b,
        });
    }
    Ok(SyntheticDataset {
        pose_a: PoseLog::new("a", log_a)?,
        pose_b: PoseLog::new("b", log_b)?,
        training: TrainingSet::new(samples, scene.wavelength, "a", "b")?,
        scene: scene.clone(),
    })
}

/// Ground-truth pattern families for the simulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PatternKind {
    /// 0 dB gain everywhere (an ideal isotropic antenna).
    Zero,
    /// Dipole with its axis vertical: deep nulls toward the poles, main
    /// lobe on the horizon, azimuth-independent.
    DipoleVertical,
    /// Dipole with its axis along body x: nulls fore and aft.
    DipoleHorizontal,
    /// Seeded random coefficients with per-degree decay, rescaled so the
    /// peak absolute gain equals `amplitude` dB.
    ShRandom {
        order: usize,
        seed: u64,
        amplitude: f64,
    },
}

impl std::fmt::Display for PatternKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PatternKind::Zero => write!(f, "zero"),
            PatternKind::DipoleVertical => write!(f, "dipole-vertical"),
            PatternKind::DipoleHorizontal => write!(f, "dipole-horizontal"),
            PatternKind::ShRandom {
                order,
                seed,
                amplitude,
            } => write!(f, "sh-random:{order}:{seed}:{amplitude}"),
        }
    }
}

impl std::str::FromStr for PatternKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => return Ok(PatternKind::Zero),
            "dipole-vertical" => return Ok(PatternKind::DipoleVertical),
            "dipole-horizontal" => return Ok(PatternKind::DipoleHorizontal),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("sh-random:") {
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() == 3 {
                let order = parts[0].parse::<usize>().ok();
                let seed = parts[1].parse::<u64>().ok();
                let amplitude = parts[2].parse::<f64>().ok();
                if let (Some(order), Some(seed), Some(amplitude)) = (order, seed, amplitude) {
                    return Ok(PatternKind::ShRandom {
                        order,
                        seed,
                        amplitude,
                    });
                }
            }
        }
        Err(Error::config(format!(
            "unknown pattern kind '{s}'; expected zero, dipole-vertical, dipole-horizontal, \
             or sh-random:ORDER:SEED:AMPLITUDE"
        )))
    }
}

/// Number of quadrature nodes used to project closed-form shapes onto
/// the harmonic basis.
const PROJECTION_NODES: usize = 8192;

/// Evenly distributed sphere directions (Fibonacci lattice).
fn projection_lattice(n: usize) -> Vec<Direction> {
    let golden = (1.0 + 5.0_f64.sqrt()) / 2.0;
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let azimuth = normalize_angle(2.0 * std::f64::consts::PI * i as f64 / golden);
            Direction::new(azimuth, z.asin())
        })
        .collect()
}

/// Projects a pointwise dB gain function onto an order-8 harmonic fit by
/// equal-weight quadrature over the lattice.
fn project_db_shape(shape_db: impl Fn(Direction) -> f64) -> Result<PatternFunction> {
    let spec = BasisSpec::SphericalHarmonics { order: 8 };
    let ev = spec.evaluator()?;
    let dim = ev.dimension();
    let mut coeffs = vec![0.0; dim];
    let mut basis = vec![0.0; dim];
    let nodes = projection_lattice(PROJECTION_NODES);
    let weight = 4.0 * std::f64::consts::PI / nodes.len() as f64;
    for dir in nodes {
        let f = shape_db(dir);
        ev.eval_into(dir, &mut basis);
        for (c, b) in coeffs.iter_mut().zip(&basis) {
            *c += weight * f * b;
        }
    }
    PatternFunction::new(spec, coeffs)
}

/// Linear-power floor for dipole nulls; a true null is -inf dB and no
/// finite basis could represent it.
const DIPOLE_FLOOR: f64 = 1e-3;

/// Builds a ground-truth pattern.
///
/// The dipole variants evaluate the floored closed-form shape in dB and
/// project it onto an order-8 harmonic fit. The projection cannot follow
/// the floored cap at the null (about 1.8 degrees across), so the
/// returned pattern bottoms out near -16 dB rather than the -30 dB
/// floor; the null direction and the lobe structure are preserved.
pub fn make_ground_truth(kind: &PatternKind) -> Result<PatternFunction> {
    match kind {
        PatternKind::Zero => PatternFunction::zero(BasisSpec::SphericalHarmonics { order: 1 }),
        PatternKind::DipoleVertical => project_db_shape(|dir| {
            let shape = dir.inclination().cos().powi(2);
            10.0 * shape.max(DIPOLE_FLOOR).log10()
        }),
        PatternKind::DipoleHorizontal => project_db_shape(|dir| {
            let along_axis = dir.inclination().cos() * dir.azimuth().cos();
            let shape = 1.0 - along_axis * along_axis;
            10.0 * shape.max(DIPOLE_FLOOR).log10()
        }),
        PatternKind::ShRandom {
            order,
            seed,
            amplitude,
        } => sh_random(*order, *seed, *amplitude),
    }
}

fn sh_random(order: usize, seed: u64, amplitude: f64) -> Result<PatternFunction> {
    let spec = BasisSpec::SphericalHarmonics { order };
    spec.validate()?;
    if !amplitude.is_finite() || amplitude < 0.0 {
        return Err(Error::config(format!(
            "pattern amplitude must be non-negative, got {amplitude}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs = Vec::with_capacity(spec.dimension());
    for l in 0..order {
        for _ in 0..(2 * l + 1) {
            let u: f64 = rand::Rng::gen_range(&mut rng, -1.0..1.0);
            coeffs.push(u * amplitude / (1 + l) as f64);
        }
    }
    // rescale so the largest absolute gain over a dense probe grid is
    // exactly the requested amplitude
    let pattern = PatternFunction::new(spec.clone(), coeffs.clone())?;
    let mut peak = 0.0_f64;
    for i in 0..72 {
        let alpha = -std::f64::consts::PI + (i as f64 + 0.5) * (2.0 * std::f64::consts::PI / 72.0);
        for j in 0..37 {
            let beta = -std::f64::consts::FRAC_PI_2 + j as f64 * (std::f64::consts::PI / 36.0);
            peak = peak.max(pattern.eval(Direction::new(alpha, beta)).abs());
        }
    }
    if peak > 0.0 {
        let scale = amplitude / peak;
        for c in &mut coeffs {
            *c *= scale;
        }
    }
    PatternFunction::new(spec, coeffs)
}
