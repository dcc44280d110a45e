//! Command-line front end wiring the calibration pipeline end to end.
//!
//! Every subcommand is deterministic: the input files, the flags, and the
//! seed fully determine all outputs except the timing columns. Summaries
//! go to standard output as single JSON lines so runs are easy to script;
//! human-oriented diagnostics go to the log (stderr, `RUST_LOG`).
//!
//! Exit codes: 0 success, 2 configuration error, 3 data/file error,
//! 4 numeric failure.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use sha2::{Digest, Sha256};

use radpat::dataio::{
    export_pattern_grid, load_model, load_pose_csv, load_signal_csv, match_samples, save_model,
    save_pose_csv, save_signal_csv, write_noise_csv, write_report_csv, write_report_json,
    MatchStats, ModelProvenance,
};
use radpat::evaluation::{benchmark, local_noise_analysis, parse_method_list, rmse, CrossValConfig};
use radpat::learning::{self, residual_targets, TrainingSet};
use radpat::models::BasisSpec;
use radpat::simulator::{
    generate_trajectory, make_ground_truth, synthesize, GroundTruthScene, HeadingMode,
    PatternKind, TrajectoryConfig,
};
use radpat::{Error, Result};

#[derive(Parser)]
#[command(
    name = "radpat",
    version,
    about = "Learn and decouple two platforms' antenna radiation patterns from RSSI logs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic calibration flight with known ground truth
    Simulate(SimulateArgs),
    /// Join two pose logs and a signal log into matched samples
    Match(MatchArgs),
    /// Fit the decoupled two-pattern model and save it as JSON
    Fit(FitArgs),
    /// Benchmark prediction methods over repeated train/test splits
    Evaluate(EvaluateArgs),
    /// Sample one side of a fitted model on a regular angle grid
    ExportPattern(ExportPatternArgs),
    /// Report local RSSI spread around each sample's neighborhood
    NoiseAnalysis(NoiseAnalysisArgs),
}

/// Flags shared by every subcommand that reads a measured dataset.
#[derive(Args)]
struct DatasetArgs {
    /// Pose CSV of the transmitting platform
    #[arg(long, value_name = "FILE")]
    pose_tx: PathBuf,

    /// Pose CSV of the receiving platform
    #[arg(long, value_name = "FILE")]
    pose_rx: PathBuf,

    /// Signal CSV with the RSSI records
    #[arg(long, value_name = "FILE")]
    signals: PathBuf,

    /// Platform id of the transmitter (matched against the signal log)
    #[arg(long, default_value = "a")]
    tx: String,

    /// Platform id of the receiver
    #[arg(long, default_value = "b")]
    rx: String,

    /// Carrier wavelength in meters
    #[arg(long, default_value_t = 0.125)]
    wavelength: f64,
}

impl DatasetArgs {
    fn load(&self) -> Result<(TrainingSet, MatchStats)> {
        let pose_tx = load_pose_csv(&self.pose_tx, &self.tx)?;
        let pose_rx = load_pose_csv(&self.pose_rx, &self.rx)?;
        let signals = load_signal_csv(&self.signals)?;
        match_samples(&pose_tx, &pose_rx, &signals, self.wavelength)
    }

    /// SHA-256 over the three input files, in flag order.
    fn dataset_hash(&self) -> Result<String> {
        let mut hasher = Sha256::new();
        for path in [&self.pose_tx, &self.pose_rx, &self.signals] {
            hasher.update(std::fs::read(path)?);
        }
        Ok(format!("{:x}", hasher.finalize()))
    }

    fn provenance_json(&self) -> serde_json::Value {
        json!({
            "pose_tx": self.pose_tx.display().to_string(),
            "pose_rx": self.pose_rx.display().to_string(),
            "signals": self.signals.display().to_string(),
            "tx": self.tx,
            "rx": self.rx,
            "wavelength": self.wavelength,
        })
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Output directory for poses_a.csv, poses_b.csv, signals.csv, scene.json
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,

    /// Circle diameter in meters (also the constant separation)
    #[arg(long, default_value_t = 10.0)]
    diameter: f64,

    /// Altitude of the circle center in meters
    #[arg(long, default_value_t = 20.0)]
    altitude: f64,

    /// Number of loops flown (one heading step between loops)
    #[arg(long, default_value_t = 24)]
    loops: usize,

    /// Samples per loop
    #[arg(long, default_value_t = 360)]
    samples_per_loop: usize,

    /// Heading increment between loops in radians (default: 2*pi/loops)
    #[arg(long, value_name = "RAD")]
    heading_step: Option<f64>,

    /// Sample rate in Hz
    #[arg(long, default_value_t = 400.0)]
    rate: f64,

    /// Heading schedule: step-a, step-b, or face-center
    #[arg(long, default_value = "step-a")]
    heading_mode: String,

    /// Ground-truth pattern of platform a
    /// (zero | dipole-vertical | dipole-horizontal | sh-random:ORDER:SEED:AMP)
    #[arg(long, default_value = "dipole-vertical", verbatim_doc_comment)]
    pattern_a: String,

    /// Ground-truth pattern of platform b (same grammar as --pattern-a)
    #[arg(long, default_value = "dipole-vertical")]
    pattern_b: String,

    /// RSSI noise standard deviation in dB
    #[arg(long, default_value_t = 2.74)]
    noise_sigma: f64,

    /// Transmit power in dBm
    #[arg(long, default_value_t = 20.0)]
    p_tx: f64,

    /// Carrier wavelength in meters
    #[arg(long, default_value_t = 0.125)]
    wavelength: f64,

    /// Noise seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct MatchArgs {
    #[command(flatten)]
    dataset: DatasetArgs,

    /// Also write the matched samples as CSV
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    dataset: DatasetArgs,

    /// Basis selector: sh:ORDER, grid:INCxAZ[:SIGMA], or poly:ORDER
    #[arg(long, default_value = "sh:14")]
    spec: String,

    /// Ridge regularization weight
    #[arg(long, default_value_t = 50.0)]
    kappa: f64,

    /// Output model file
    #[arg(long, value_name = "FILE", default_value = "model.json")]
    output: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    dataset: DatasetArgs,

    /// Comma-separated method list; entries are mean, knn:K, or a basis
    /// selector (sh:N, grid:IxA[:SIGMA], poly:N)
    #[arg(long, default_value = "mean,sh:14,knn:10")]
    methods: String,

    /// Number of random train/test splits
    #[arg(long, default_value_t = 30)]
    splits: usize,

    /// Fraction of samples held out per split
    #[arg(long, default_value_t = 0.2)]
    test_fraction: f64,

    /// Split-shuffle seed
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Ridge regularization weight for basis methods
    #[arg(long, default_value_t = 50.0)]
    kappa: f64,

    /// Report CSV (method,rmse_db,param_count,aic,t_lin_s,q95_db)
    #[arg(long, value_name = "FILE", default_value = "report.csv")]
    report: PathBuf,

    /// Also write the full report (config + per-split stats) as JSON
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct ExportPatternArgs {
    /// Fitted model JSON
    #[arg(long, value_name = "FILE")]
    model: PathBuf,

    /// Which platform's pattern to export: a or b
    #[arg(long, default_value = "a")]
    side: String,

    /// Output CSV (alpha_rad,beta_rad,gain_db)
    #[arg(long, value_name = "FILE", default_value = "pattern.csv")]
    output: PathBuf,

    /// Azimuth sample count (cell centers over the full circle)
    #[arg(long, default_value_t = 360)]
    n_azimuth: usize,

    /// Inclination sample count (inclusive from -pi/2 to pi/2)
    #[arg(long, default_value_t = 181)]
    n_inclination: usize,
}

#[derive(Args)]
struct NoiseAnalysisArgs {
    #[command(flatten)]
    dataset: DatasetArgs,

    /// Neighborhood size
    #[arg(long, default_value_t = 10)]
    k: usize,

    /// Output CSV (t,max_spread_deg,rssi_std_db)
    #[arg(long, value_name = "FILE", default_value = "noise.csv")]
    output: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config(_) => 2,
                Error::Data(_) | Error::Io(_) | Error::Version { .. } => 3,
                Error::Numeric(_) => 4,
            })
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Simulate(args) => run_simulate(args),
        Command::Match(args) => run_match(args),
        Command::Fit(args) => run_fit(args),
        Command::Evaluate(args) => run_evaluate(args),
        Command::ExportPattern(args) => run_export_pattern(args),
        Command::NoiseAnalysis(args) => run_noise_analysis(args),
    }
}

fn print_summary(value: &serde_json::Value) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer(&mut out, value)
        .map_err(|e| Error::Data(format!("summary serialization failed: {e}")))?;
    out.write_all(b"\n")?;
    Ok(())
}

fn run_simulate(args: SimulateArgs) -> Result<()> {
    let mut traj = TrajectoryConfig::with_loops(args.loops, args.samples_per_loop);
    traj.diameter = args.diameter;
    traj.center_altitude = args.altitude;
    traj.sample_rate_hz = args.rate;
    traj.heading_mode = args.heading_mode.parse::<HeadingMode>()?;
    if let Some(step) = args.heading_step {
        traj.heading_step = step;
    }

    let kind_a: PatternKind = args.pattern_a.parse()?;
    let kind_b: PatternKind = args.pattern_b.parse()?;
    let mut scene = GroundTruthScene::new(
        make_ground_truth(&kind_a)?,
        make_ground_truth(&kind_b)?,
        args.seed,
    );
    scene.p_tx_dbm = args.p_tx;
    scene.wavelength = args.wavelength;
    scene.noise_sigma = args.noise_sigma;

    let poses = generate_trajectory(&traj)?;
    let dataset = synthesize(&poses, &scene)?;

    std::fs::create_dir_all(&args.out)?;
    let path_a = args.out.join("poses_a.csv");
    let path_b = args.out.join("poses_b.csv");
    let path_signals = args.out.join("signals.csv");
    let path_scene = args.out.join("scene.json");
    save_pose_csv(&dataset.pose_a, &path_a)?;
    save_pose_csv(&dataset.pose_b, &path_b)?;
    save_signal_csv(&dataset.signal_log(), &path_signals)?;

    // full provenance: trajectory, pattern grammar, and the exact
    // ground-truth coefficients the run can later be scored against
    let scene_json = json!({
        "trajectory": traj,
        "pattern_a": kind_a.to_string(),
        "pattern_b": kind_b.to_string(),
        "ground_truth": scene,
    });
    let mut f = std::io::BufWriter::new(std::fs::File::create(&path_scene)?);
    serde_json::to_writer_pretty(&mut f, &scene_json)
        .map_err(|e| Error::Data(format!("scene serialization failed: {e}")))?;
    f.write_all(b"\n")?;
    f.flush()?;

    print_summary(&json!({
        "samples": dataset.training.len(),
        "separation_m": traj.diameter,
        "noise_sigma_db": scene.noise_sigma,
        "seed": scene.seed,
        "poses_a": path_a.display().to_string(),
        "poses_b": path_b.display().to_string(),
        "signals": path_signals.display().to_string(),
        "scene": path_scene.display().to_string(),
    }))
}

const MATCH_HEADER: [&str; 8] = [
    "t",
    "alpha_tx_rad",
    "beta_tx_rad",
    "alpha_rx_rad",
    "beta_rx_rad",
    "distance_m",
    "p_tx_dbm",
    "p_rx_dbm",
];

fn write_match_csv(ts: &TrainingSet, path: &Path) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(std::io::BufWriter::new(std::fs::File::create(path)?));
    wtr.write_record(MATCH_HEADER)?;
    for s in ts.samples() {
        wtr.serialize((
            s.t,
            s.obs.dir_b_in_a.azimuth(),
            s.obs.dir_b_in_a.inclination(),
            s.obs.dir_a_in_b.azimuth(),
            s.obs.dir_a_in_b.inclination(),
            s.obs.distance,
            s.p_tx_dbm,
            s.p_rx_dbm,
        ))?;
    }
    wtr.flush()?;
    Ok(())
}

fn run_match(args: MatchArgs) -> Result<()> {
    let (ts, stats) = args.dataset.load()?;
    if let Some(path) = &args.output {
        write_match_csv(&ts, path)?;
    }
    let samples = ts.samples();
    print_summary(&json!({
        "total": stats.total,
        "matched": stats.matched,
        "other_direction": stats.other_direction,
        "out_of_range": stats.out_of_range,
        "t_first": samples.first().map(|s| s.t),
        "t_last": samples.last().map(|s| s.t),
        "output": args.output.as_ref().map(|p| p.display().to_string()),
    }))
}

fn run_fit(args: FitArgs) -> Result<()> {
    let spec: BasisSpec = args.spec.parse()?;
    let (ts, stats) = args.dataset.load()?;
    log::info!(
        "matched {} of {} signal records",
        stats.matched,
        stats.total
    );
    let model = learning::fit(&ts, &spec, args.kappa)?;

    let mut config = args.dataset.provenance_json();
    config["command"] = json!("fit");
    config["spec"] = json!(args.spec);
    config["kappa"] = json!(args.kappa);
    let provenance = ModelProvenance {
        dataset_hash: args.dataset.dataset_hash()?,
        config,
    };
    save_model(&model, &provenance, &args.output)?;

    let y = residual_targets(&ts)?;
    let residuals: Vec<f64> = ts
        .samples()
        .iter()
        .zip(&y)
        .map(|(s, yi)| yi - model.predict_gain(&s.obs))
        .collect();
    print_summary(&json!({
        "model": args.output.display().to_string(),
        "spec": spec.to_string(),
        "params_per_pattern": spec.dimension(),
        "kappa": args.kappa,
        "n_samples": ts.len(),
        "train_rmse_db": rmse(&residuals)?,
    }))
}

fn run_evaluate(args: EvaluateArgs) -> Result<()> {
    let methods = parse_method_list(&args.methods)?;
    let cv = CrossValConfig {
        splits: args.splits,
        test_fraction: args.test_fraction,
        seed: args.seed,
    };
    let (ts, _) = args.dataset.load()?;
    let report = benchmark(&ts, &methods, &cv, args.kappa)?;

    write_report_csv(&report, &args.report)?;
    if let Some(path) = &args.json {
        write_report_json(&report, path)?;
    }
    for outcome in &report.outcomes {
        let line = match (&outcome.report, &outcome.error) {
            (Some(r), _) => json!({
                "method": r.method,
                "rmse_db": r.rmse_db,
                "param_count": r.param_count,
                "aic": r.aic,
                "t_lin_s": r.t_lin_s,
                "q95_db": r.q95_db,
            }),
            (None, Some(e)) => json!({ "method": outcome.method, "error": e }),
            (None, None) => json!({ "method": outcome.method }),
        };
        print_summary(&line)?;
    }
    Ok(())
}

fn run_export_pattern(args: ExportPatternArgs) -> Result<()> {
    let model = load_model(&args.model)?.model();
    let pattern = match args.side.as_str() {
        "a" => model.pattern_a(),
        "b" => model.pattern_b(),
        other => {
            return Err(Error::Config(format!(
                "side must be 'a' or 'b', got '{other}'"
            )))
        }
    };
    export_pattern_grid(&pattern, args.n_azimuth, args.n_inclination, &args.output)?;
    print_summary(&json!({
        "output": args.output.display().to_string(),
        "side": args.side,
        "rows": args.n_azimuth * args.n_inclination,
    }))
}

fn run_noise_analysis(args: NoiseAnalysisArgs) -> Result<()> {
    let (ts, _) = args.dataset.load()?;
    let points = local_noise_analysis(&ts, args.k)?;
    write_noise_csv(&points, &args.output)?;

    let median = |mut v: Vec<f64>| -> f64 {
        v.sort_by(|a, b| a.partial_cmp(b).expect("finite statistics"));
        v[v.len() / 2]
    };
    print_summary(&json!({
        "rows": points.len(),
        "k": args.k,
        "median_max_spread_deg": median(points.iter().map(|p| p.max_spread_deg).collect()),
        "median_rssi_std_db": median(points.iter().map(|p| p.rssi_std_db).collect()),
        "output": args.output.display().to_string(),
    }))
}
