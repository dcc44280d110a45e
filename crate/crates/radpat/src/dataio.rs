//! File formats, pose-signal time matching, and model persistence.
//!
//! Three CSV schemas carry all measurement data (UTF-8, `.` decimals,
//! LF endings, exact headers):
//!
//! * poses: `t,x,y,z,roll,pitch,yaw` (seconds, meters, radians); a
//!   reduced `t,x,y,z,yaw` header is accepted with roll = pitch = 0
//! * signals: `t,tx,rx,p_tx_dbm,p_rx_dbm`
//! * pattern grids: `alpha_rad,beta_rad,gain_db`
//!
//! Floats are written in the shortest representation that parses back to
//! the identical bits, so save/load round-trips are lossless and repeated
//! runs produce byte-identical files. Fitted models persist as versioned
//! JSON with provenance.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write as _};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::{BenchmarkReport, NoisePoint};
use crate::geometry::{joint_observation, lerp_angle, FullPose, Vec3};
use crate::learning::{DecoupledModel, MatchedSample, TrainingSet};
use crate::models::{BasisSpec, PatternFunction};

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        let msg = e.to_string();
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            _ => Error::data(msg),
        }
    }
}

/// Opens a file with the path prefixed onto any failure, so "no such
/// file" errors say which file.
fn open_with_context(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

/// One pose-log row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimedPose {
    pub t: f64,
    pub pose: FullPose,
}

/// A platform's timestamped pose track, strictly increasing in time.
#[derive(Debug, Clone, PartialEq)]
pub struct PoseLog {
    uav_id: String,
    poses: Vec<TimedPose>,
}

impl PoseLog {
    pub fn new(uav_id: impl Into<String>, poses: Vec<TimedPose>) -> Result<Self> {
        let uav_id = uav_id.into();
        if uav_id.is_empty() {
            return Err(Error::data("pose log needs a non-empty platform id"));
        }
        if poses.is_empty() {
            return Err(Error::data(format!("pose log '{uav_id}' is empty")));
        }
        for (i, p) in poses.iter().enumerate() {
            let v = p.pose.position;
            if !p.t.is_finite()
                || !v.x.is_finite()
                || !v.y.is_finite()
                || !v.z.is_finite()
                || !p.pose.roll.is_finite()
                || !p.pose.pitch.is_finite()
                || !p.pose.yaw.is_finite()
            {
                return Err(Error::data(format!(
                    "pose log '{uav_id}': non-finite value in row {i}"
                )));
            }
            if i > 0 && p.t <= poses[i - 1].t {
                return Err(Error::data(format!(
                    "pose log '{uav_id}': timestamps not strictly increasing in row {i} \
                     (t = {} after {})",
                    p.t,
                    poses[i - 1].t
                )));
            }
        }
        Ok(PoseLog { uav_id, poses })
    }

    pub fn uav_id(&self) -> &str {
        &self.uav_id
    }

    pub fn poses(&self) -> &[TimedPose] {
        &self.poses
    }

    pub fn len(&self) -> usize {
        self.poses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poses.is_empty()
    }

    /// First and last timestamp.
    pub fn time_range(&self) -> (f64, f64) {
        (self.poses[0].t, self.poses[self.poses.len() - 1].t)
    }

    /// Pose at time `t`: verbatim on an exact row hit, otherwise linear
    /// in position and shortest-arc in each angle between the bracketing
    /// rows. `None` outside the log's time range.
    pub fn interpolate_at(&self, t: f64) -> Option<FullPose> {
        let i = self.poses.partition_point(|p| p.t < t);
        if i == self.poses.len() {
            return None;
        }
        if self.poses[i].t == t {
            return Some(self.poses[i].pose);
        }
        if i == 0 {
            return None; // t precedes the first row
        }
        let (p0, p1) = (&self.poses[i - 1], &self.poses[i]);
        let u = (t - p0.t) / (p1.t - p0.t);
        let a = p0.pose.position;
        let b = p1.pose.position;
        let position = Vec3::new(
            a.x + (b.x - a.x) * u,
            a.y + (b.y - a.y) * u,
            a.z + (b.z - a.z) * u,
        );
        Some(FullPose::new(
            position,
            lerp_angle(p0.pose.roll, p1.pose.roll, u),
            lerp_angle(p0.pose.pitch, p1.pose.pitch, u),
            lerp_angle(p0.pose.yaw, p1.pose.yaw, u),
        ))
    }
}

/// One received-frame record.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalRecord {
    pub t: f64,
    pub tx: String,
    pub rx: String,
    pub p_tx_dbm: f64,
    pub p_rx_dbm: f64,
}

/// Timestamped RSSI records, non-decreasing in time.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalLog {
    records: Vec<SignalRecord>,
}

impl SignalLog {
    pub fn new(records: Vec<SignalRecord>) -> Result<Self> {
        for (i, r) in records.iter().enumerate() {
            if !r.t.is_finite() || !r.p_tx_dbm.is_finite() || !r.p_rx_dbm.is_finite() {
                return Err(Error::data(format!("signal log: non-finite value in row {i}")));
            }
            if r.tx.is_empty() || r.rx.is_empty() {
                return Err(Error::data(format!("signal log: empty platform id in row {i}")));
            }
            if i > 0 && r.t < records[i - 1].t {
                return Err(Error::data(format!(
                    "signal log: timestamps decrease in row {i} (t = {} after {})",
                    r.t,
                    records[i - 1].t
                )));
            }
        }
        Ok(SignalLog { records })
    }

    pub fn records(&self) -> &[SignalRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

const POSE_HEADER: [&str; 7] = ["t", "x", "y", "z", "roll", "pitch", "yaw"];
const POSE_HEADER_REDUCED: [&str; 5] = ["t", "x", "y", "z", "yaw"];
const SIGNAL_HEADER: [&str; 5] = ["t", "tx", "rx", "p_tx_dbm", "p_rx_dbm"];

fn record_line(rec: &csv::StringRecord) -> u64 {
    rec.position().map(|p| p.line()).unwrap_or(0)
}

fn parse_float(rec: &csv::StringRecord, idx: usize, name: &str, path: &Path) -> Result<f64> {
    let raw = rec.get(idx).ok_or_else(|| {
        Error::data(format!(
            "{}: line {}: missing column '{name}'",
            path.display(),
            record_line(rec)
        ))
    })?;
    raw.trim().parse::<f64>().map_err(|_| {
        Error::data(format!(
            "{}: line {}: column '{name}' is not a number: '{raw}'",
            path.display(),
            record_line(rec)
        ))
    })
}

/// Loads a pose CSV (`t,x,y,z,roll,pitch,yaw`). The reduced header
/// `t,x,y,z,yaw` is accepted with a warning; roll and pitch default to 0.
pub fn load_pose_csv(path: impl AsRef<Path>, uav_id: impl Into<String>) -> Result<PoseLog> {
    let path = path.as_ref();
    let uav_id = uav_id.into();
    let mut rdr = csv::Reader::from_reader(BufReader::new(open_with_context(path)?));
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::data(format!("{}: {e}", path.display())))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let reduced = if headers == POSE_HEADER {
        false
    } else if headers == POSE_HEADER_REDUCED {
        log::warn!(
            "{}: no roll/pitch columns; assuming a level platform (both 0)",
            path.display()
        );
        true
    } else {
        return Err(Error::data(format!(
            "{}: unexpected pose header {:?}; expected {:?} or {:?}",
            path.display(),
            headers,
            POSE_HEADER,
            POSE_HEADER_REDUCED
        )));
    };

    let mut poses = Vec::new();
    let mut last_t: Option<f64> = None;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::data(format!("{}: {e}", path.display())))?;
        let line = record_line(&rec);
        let t = parse_float(&rec, 0, "t", path)?;
        let x = parse_float(&rec, 1, "x", path)?;
        let y = parse_float(&rec, 2, "y", path)?;
        let z = parse_float(&rec, 3, "z", path)?;
        let (roll, pitch, yaw) = if reduced {
            (0.0, 0.0, parse_float(&rec, 4, "yaw", path)?)
        } else {
            (
                parse_float(&rec, 4, "roll", path)?,
                parse_float(&rec, 5, "pitch", path)?,
                parse_float(&rec, 6, "yaw", path)?,
            )
        };
        if let Some(prev) = last_t {
            if t <= prev {
                return Err(Error::data(format!(
                    "{}: line {line}: timestamps not strictly increasing (t = {t} after {prev})",
                    path.display()
                )));
            }
        }
        last_t = Some(t);
        poses.push(TimedPose {
            t,
            pose: FullPose::new(Vec3::new(x, y, z), roll, pitch, yaw),
        });
    }
    PoseLog::new(uav_id, poses)
        .map_err(|e| Error::data(format!("{}: {e}", path.display())))
}

/// Writes a pose CSV with the full header.
pub fn save_pose_csv(log: &PoseLog, path: impl AsRef<Path>) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(BufWriter::new(File::create(path.as_ref())?));
    wtr.write_record(POSE_HEADER)?;
    for p in log.poses() {
        wtr.serialize((
            p.t,
            p.pose.position.x,
            p.pose.position.y,
            p.pose.position.z,
            p.pose.roll,
            p.pose.pitch,
            p.pose.yaw,
        ))?;
    }
    wtr.flush()?;
    Ok(())
}

/// Loads a signal CSV (`t,tx,rx,p_tx_dbm,p_rx_dbm`).
pub fn load_signal_csv(path: impl AsRef<Path>) -> Result<SignalLog> {
    let path = path.as_ref();
    let mut rdr = csv::Reader::from_reader(BufReader::new(open_with_context(path)?));
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::data(format!("{}: {e}", path.display())))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if headers != SIGNAL_HEADER {
        return Err(Error::data(format!(
            "{}: unexpected signal header {:?}; expected {:?}",
            path.display(),
            headers,
            SIGNAL_HEADER
        )));
    }
    let mut records = Vec::new();
    let mut last_t: Option<f64> = None;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::data(format!("{}: {e}", path.display())))?;
        let line = record_line(&rec);
        let t = parse_float(&rec, 0, "t", path)?;
        let tx = rec.get(1).unwrap_or("").trim().to_string();
        let rx = rec.get(2).unwrap_or("").trim().to_string();
        if tx.is_empty() || rx.is_empty() {
            return Err(Error::data(format!(
                "{}: line {line}: empty platform id",
                path.display()
            )));
        }
        let p_tx_dbm = parse_float(&rec, 3, "p_tx_dbm", path)?;
        let p_rx_dbm = parse_float(&rec, 4, "p_rx_dbm", path)?;
        if let Some(prev) = last_t {
            if t < prev {
                return Err(Error::data(format!(
                    "{}: line {line}: timestamps decrease (t = {t} after {prev})",
                    path.display()
                )));
            }
        }
        last_t = Some(t);
        records.push(SignalRecord {
            t,
            tx,
            rx,
            p_tx_dbm,
            p_rx_dbm,
        });
    }
    SignalLog::new(records).map_err(|e| Error::data(format!("{}: {e}", path.display())))
}

/// Writes a signal CSV.
pub fn save_signal_csv(log: &SignalLog, path: impl AsRef<Path>) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(BufWriter::new(File::create(path.as_ref())?));
    wtr.write_record(SIGNAL_HEADER)?;
    for r in log.records() {
        wtr.serialize((r.t, &r.tx, &r.rx, r.p_tx_dbm, r.p_rx_dbm))?;
    }
    wtr.flush()?;
    Ok(())
}

/// Accounting of one matching pass over a signal log.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchStats {
    /// All records in the signal log.
    pub total: usize,
    /// Records carrying a different tx/rx pair than requested.
    pub other_direction: usize,
    /// Right direction but outside the pose logs' common time range.
    pub out_of_range: usize,
    /// Emitted as training samples.
    pub matched: usize,
}

/// Joins a signal log with the two pose tracks into a training set.
///
/// Keeps only records transmitted by `pose_tx`'s platform and received by
/// `pose_rx`'s whose timestamp lies inside both logs; each kept record
/// gets both poses interpolated at its timestamp, and the mutual
/// observation is computed from those poses. Counts of everything
/// discarded come back in [`MatchStats`].
pub fn match_samples(
    pose_tx: &PoseLog,
    pose_rx: &PoseLog,
    signals: &SignalLog,
    wavelength: f64,
) -> Result<(TrainingSet, MatchStats)> {
    if pose_tx.uav_id() == pose_rx.uav_id() {
        return Err(Error::config(format!(
            "transmitter and receiver pose logs carry the same id '{}'",
            pose_tx.uav_id()
        )));
    }
    let (tx0, tx1) = pose_tx.time_range();
    let (rx0, rx1) = pose_rx.time_range();
    let start = tx0.max(rx0);
    let end = tx1.min(rx1);
    if start > end {
        return Err(Error::data(format!(
            "pose logs do not overlap in time ([{tx0}, {tx1}] vs [{rx0}, {rx1}])"
        )));
    }

    let mut stats = MatchStats {
        total: signals.len(),
        other_direction: 0,
        out_of_range: 0,
        matched: 0,
    };
    let mut samples = Vec::new();
    for r in signals.records() {
        if r.tx != pose_tx.uav_id() || r.rx != pose_rx.uav_id() {
            stats.other_direction += 1;
            continue;
        }
        let (Some(ptx), Some(prx)) = (pose_tx.interpolate_at(r.t), pose_rx.interpolate_at(r.t))
        else {
            stats.out_of_range += 1;
            continue;
        };
        let obs = joint_observation(&ptx, &prx)?;
        samples.push(MatchedSample {
            t: r.t,
            obs,
            p_tx_dbm: r.p_tx_dbm,
            p_rx_dbm: r.p_rx_dbm,
        });
        stats.matched += 1;
    }
    if samples.is_empty() {
        return Err(Error::data(format!(
            "no signal records match direction {} -> {} inside the pose overlap \
             ({} other direction, {} out of range)",
            pose_tx.uav_id(),
            pose_rx.uav_id(),
            stats.other_direction,
            stats.out_of_range
        )));
    }
    let ts = TrainingSet::new(samples, wavelength, pose_tx.uav_id(), pose_rx.uav_id())?;
    Ok((ts, stats))
}

/// Current model-file format version.
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Where a model came from: a digest of the input data and the
/// configuration that produced the fit (free-form JSON).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ModelProvenance {
    pub dataset_hash: String,
    pub config: serde_json::Value,
}

/// On-disk model representation (versioned JSON).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub spec: BasisSpec,
    pub kappa: f64,
    pub wavelength: f64,
    pub a_id: String,
    pub b_id: String,
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    pub provenance: ModelProvenance,
}

impl ModelFile {
    pub fn new(model: &DecoupledModel, provenance: ModelProvenance) -> Self {
        ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            spec: model.spec.clone(),
            kappa: model.kappa,
            wavelength: model.wavelength,
            a_id: model.a_id.clone(),
            b_id: model.b_id.clone(),
            phi: model.phi.clone(),
            psi: model.psi.clone(),
            provenance,
        }
    }

    pub fn model(&self) -> DecoupledModel {
        DecoupledModel {
            spec: self.spec.clone(),
            kappa: self.kappa,
            wavelength: self.wavelength,
            a_id: self.a_id.clone(),
            b_id: self.b_id.clone(),
            phi: self.phi.clone(),
            psi: self.psi.clone(),
        }
    }

    fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        let dim = self.spec.dimension();
        if self.phi.len() != dim || self.psi.len() != dim {
            return Err(Error::data(format!(
                "coefficient counts ({}, {}) do not match the basis dimension {dim}",
                self.phi.len(),
                self.psi.len()
            )));
        }
        if self.phi.iter().chain(&self.psi).any(|v| !v.is_finite()) {
            return Err(Error::data("non-finite model coefficient"));
        }
        if !self.kappa.is_finite() || self.kappa < 0.0 {
            return Err(Error::data(format!("invalid ridge weight {}", self.kappa)));
        }
        if !self.wavelength.is_finite() || self.wavelength <= 0.0 {
            return Err(Error::data(format!("invalid wavelength {}", self.wavelength)));
        }
        Ok(())
    }
}

/// Persists a fitted model as versioned JSON.
pub fn save_model(
    model: &DecoupledModel,
    provenance: &ModelProvenance,
    path: impl AsRef<Path>,
) -> Result<()> {
    let file = ModelFile::new(model, provenance.clone());
    file.validate()?;
    let mut out = BufWriter::new(File::create(path.as_ref())?);
    serde_json::to_writer_pretty(&mut out, &file)
        .map_err(|e| Error::data(format!("model serialization failed: {e}")))?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

/// Loads and validates a model file, refusing unknown format versions.
pub fn load_model(path: impl AsRef<Path>) -> Result<ModelFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::data(format!("{}: not valid JSON: {e}", path.display())))?;
    let found = value
        .get("format_version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| {
            Error::data(format!("{}: missing format_version field", path.display()))
        })?;
    if found != MODEL_FORMAT_VERSION as u64 {
        return Err(Error::Version {
            found: found as u32,
            expected: MODEL_FORMAT_VERSION,
        });
    }
    let file: ModelFile = serde_json::from_value(value)
        .map_err(|e| Error::data(format!("{}: malformed model file: {e}", path.display())))?;
    file.validate()
        .map_err(|e| Error::data(format!("{}: {e}", path.display())))?;
    Ok(file)
}

/// Samples a pattern on a uniform azimuth x inclination lattice and
/// writes `alpha_rad,beta_rad,gain_db` rows (azimuth-major). Azimuth uses
/// cell centers over (-pi, pi]; inclination spans [-pi/2, pi/2] inclusive.
pub fn export_pattern_grid(
    pattern: &PatternFunction,
    n_azimuth: usize,
    n_inclination: usize,
    path: impl AsRef<Path>,
) -> Result<()> {
    if n_azimuth == 0 || n_inclination == 0 {
        return Err(Error::config("pattern grid needs at least one row and column"));
    }
    let mut wtr = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(BufWriter::new(File::create(path.as_ref())?));
    wtr.write_record(["alpha_rad", "beta_rad", "gain_db"])?;
    for i in 0..n_azimuth {
        let alpha = -std::f64::consts::PI
            + (i as f64 + 0.5) * (2.0 * std::f64::consts::PI / n_azimuth as f64);
        for j in 0..n_inclination {
            let beta = if n_inclination == 1 {
                0.0
            } else {
                -std::f64::consts::FRAC_PI_2
                    + j as f64 * (std::f64::consts::PI / (n_inclination - 1) as f64)
            };
            let dir = crate::geometry::Direction::new(alpha, beta);
            wtr.serialize((alpha, beta, pattern.eval(dir)))?;
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Writes the benchmark summary table. Columns are exactly
/// `method,rmse_db,param_count,aic,t_lin_s,q95_db`, one row per method
/// that produced a report (failed methods appear only in the JSON form).
pub fn write_report_csv(report: &BenchmarkReport, path: impl AsRef<Path>) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(BufWriter::new(File::create(path.as_ref())?));
    wtr.write_record(["method", "rmse_db", "param_count", "aic", "t_lin_s", "q95_db"])?;
    for r in report.reports() {
        wtr.serialize((
            &r.method,
            r.rmse_db,
            r.param_count,
            r.aic,
            r.t_lin_s,
            r.q95_db,
        ))?;
    }
    wtr.flush()?;
    Ok(())
}

/// Writes the full benchmark report (config, per-split metric arrays,
/// and per-method errors) as pretty JSON.
pub fn write_report_json(report: &BenchmarkReport, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path.as_ref())?);
    serde_json::to_writer_pretty(&mut out, report)
        .map_err(|e| Error::data(format!("report serialization failed: {e}")))?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

/// Writes local noise-analysis points as `t,max_spread_deg,rssi_std_db`.
pub fn write_noise_csv(points: &[NoisePoint], path: impl AsRef<Path>) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(BufWriter::new(File::create(path.as_ref())?));
    wtr.write_record(["t", "max_spread_deg", "rssi_std_db"])?;
    for p in points {
        wtr.serialize((p.t, p.max_spread_deg, p.rssi_std_db))?;
    }
    wtr.flush()?;
    Ok(())
}
