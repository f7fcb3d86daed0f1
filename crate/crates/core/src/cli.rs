//! The `roadsense` command-line tool. Each subcommand reads its inputs, calls
//! one library function and writes that function's output unchanged.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 solver did not
//! converge.

use std::ffi::OsString;
use std::fmt::Display;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::explore::{pca_fit, pca_transform, write_scores_csv};
use crate::learn::{split_dataset, sweep_c, Dataset, LearnError, SmoParams};
use crate::mapgen::{build_html, build_map, locate_response};
use crate::pipeline::{evaluate_task, task_pr_curve, train_pothole, train_road, TrainConfig, TrainReport};
use crate::service::{
    classify_batch, load_bundle, replay_client, save_bundle, serve, ClassifyResponse, ModelBundle, ReplayConfig,
    ServeConfig, TaskModel,
};
use crate::telemetry::{parse_drive_log, parse_pothole_labels, synth_drive, Condition, DriveLog, SynthConfig};
use crate::windows::{
    attach_condition_label, attach_pothole_labels, make_windows, read_feature_csv, write_feature_csv, Scaler, Window,
    NUM_FEATURES, POTHOLE_WINDOW, ROAD_WINDOW,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "roadsense", version, about = "Road condition and pothole classification from 5 Hz IMU/GPS logs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a seeded synthetic drive log and its pothole labels.
    Synth(SynthArgs),
    /// Cut a drive log into windows and write the feature matrix.
    Featurize(FeaturizeArgs),
    /// Fit both task models from feature matrices and write a bundle.
    Train(TrainArgs),
    /// Score labelled feature matrices with a bundle.
    Eval(EvalArgs),
    /// Precision-recall curve of a bundle's task model.
    PrCurve(PrCurveArgs),
    /// Train and test error over a grid of C values.
    SweepC(SweepArgs),
    /// Project standardized features onto leading principal components.
    Pca(PcaArgs),
    /// Classify a drive log offline; prints the server's response body.
    Classify(ClassifyArgs),
    /// Run the HTTP classification service.
    Serve(ServeArgs),
    /// Stream a drive log to a running service.
    Replay(ReplayArgs),
    /// Draw classified intervals as a GeoJSON map.
    Map(MapArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConditionArg {
    Good,
    Bad,
}

impl From<ConditionArg> for Condition {
    fn from(c: ConditionArg) -> Self {
        match c {
            ConditionArg::Good => Condition::Good,
            ConditionArg::Bad => Condition::Bad,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
enum Task {
    Road,
    Pothole,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Length of the drive in seconds.
    #[arg(long, default_value_t = 300.0)]
    duration: f64,
    #[arg(long, value_enum, default_value = "good")]
    condition: ConditionArg,
    /// Number of injected pothole events.
    #[arg(long, default_value_t = 0)]
    potholes: usize,
    /// Unix time of the first sample.
    #[arg(long, default_value_t = 1_476_000_000.0)]
    start_t: f64,
    /// Drive log CSV (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Pothole label CSV.
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FeaturizeArgs {
    #[arg(long)]
    log: PathBuf,
    #[arg(long, value_enum, default_value = "road")]
    task: Task,
    /// Samples per window (25 for road, 10 for pothole by default).
    #[arg(long)]
    window: Option<usize>,
    /// Road condition label for every window of the log.
    #[arg(long, value_enum)]
    condition: Option<ConditionArg>,
    /// Pothole label CSV; windows containing an event are labelled 1.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SolverArgs {
    #[arg(long = "c", default_value_t = 250.0)]
    c: f64,
    #[arg(long, default_value_t = 1.0 / NUM_FEATURES as f64)]
    gamma: f64,
    /// Stopping tolerance on the KKT violation gap.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    /// Iteration budget in multiples of the training set size.
    #[arg(long, default_value_t = 200)]
    max_passes: usize,
}

impl SolverArgs {
    fn params(&self) -> SmoParams {
        SmoParams { c: self.c, gamma: self.gamma, tol: self.tol, max_passes: self.max_passes }
    }
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Road condition feature matrices (repeatable).
    #[arg(long, required = true)]
    road: Vec<PathBuf>,
    /// Pothole feature matrices (repeatable).
    #[arg(long, required = true)]
    pothole: Vec<PathBuf>,
    #[arg(long, default_value_t = ROAD_WINDOW)]
    road_window: usize,
    #[arg(long, default_value_t = POTHOLE_WINDOW)]
    pothole_window: usize,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, default_value_t = 0.3)]
    test_fraction: f64,
    /// Minimum test precision for the pothole cutoff.
    #[arg(long, default_value_t = 0.78)]
    min_precision: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Recorded training time in Unix seconds (default: now, or
    /// SOURCE_DATE_EPOCH when set).
    #[arg(long, env = "SOURCE_DATE_EPOCH")]
    trained_at: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct BundleArg {
    #[arg(long, env = "ROADSENSE_BUNDLE")]
    bundle: PathBuf,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    bundle: BundleArg,
    #[arg(long, value_enum)]
    task: Task,
    #[arg(long, required = true)]
    features: Vec<PathBuf>,
}

#[derive(Debug, Args)]
struct PrCurveArgs {
    #[command(flatten)]
    bundle: BundleArg,
    #[arg(long, value_enum, default_value = "pothole")]
    task: Task,
    #[arg(long, required = true)]
    features: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, required = true)]
    features: Vec<PathBuf>,
    #[arg(long, default_value_t = ROAD_WINDOW)]
    window: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.1,1,10,100,250,1000")]
    grid: Vec<f64>,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, default_value_t = 0.3)]
    test_fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PcaArgs {
    #[arg(long, required = true)]
    features: Vec<PathBuf>,
    /// Standardize with this bundle's scaler instead of one fitted to the input.
    #[arg(long)]
    bundle: Option<PathBuf>,
    /// Which of the bundle's scalers to use.
    #[arg(long, value_enum, default_value = "road")]
    task: Task,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[command(flatten)]
    bundle: BundleArg,
    #[arg(long)]
    log: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[command(flatten)]
    bundle: BundleArg,
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
}

#[derive(Debug, Args)]
struct ReplayArgs {
    #[arg(long)]
    log: PathBuf,
    #[arg(long, default_value = "http://127.0.0.1:8080")]
    server: String,
    #[arg(long, default_value_t = 5.0)]
    chunk_seconds: f64,
    /// Pace requests at this multiple of real time.
    #[arg(long)]
    speedup: Option<f64>,
    #[arg(long, default_value_t = 3)]
    attempts: u32,
}

#[derive(Debug, Args)]
struct MapArgs {
    /// Output of `classify` for the log.
    #[arg(long)]
    classified: PathBuf,
    /// The drive log that was classified; supplies positions.
    #[arg(long)]
    log: PathBuf,
    #[arg(long, default_value = "map.geojson")]
    out: PathBuf,
    /// Also write a standalone HTML viewer.
    #[arg(long)]
    html: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Data(String),
    Convergence(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Data(_) => EXIT_DATA,
            CliError::Convergence(_) => EXIT_CONVERGENCE,
        }
    }
}

impl Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Data(m) | CliError::Convergence(m) => f.write_str(m),
        }
    }
}

impl From<LearnError> for CliError {
    fn from(e: LearnError) -> Self {
        match e {
            LearnError::NoConvergence { .. } => CliError::Convergence(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

type CliResult = Result<(), CliError>;

fn data<E: Display>(context: impl Display) -> impl FnOnce(E) -> CliError {
    move |e| CliError::Data(format!("{context}: {e}"))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(data(path.display()))
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> CliResult {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(data(p.display())),
        None => std::io::stdout().write_all(bytes).map_err(data("stdout")),
    }
}

/// Writes `<out>.meta.json` next to a CSV artifact.
fn write_meta(out: Option<&Path>, meta: serde_json::Value) -> CliResult {
    let Some(out) = out else { return Ok(()) };
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    let mut text = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    text.push('\n');
    write_output(Some(Path::new(&name)), text.as_bytes())
}

fn load_log(path: &Path) -> Result<DriveLog, CliError> {
    parse_drive_log(&read_text(path)?).map_err(data(path.display()))
}

fn load_bundle_file(path: &Path) -> Result<ModelBundle, CliError> {
    let bytes = std::fs::read(path).map_err(data(path.display()))?;
    load_bundle(&bytes).map_err(data(path.display()))
}

fn load_features(paths: &[PathBuf], window: usize) -> Result<Vec<Window>, CliError> {
    let mut all = Vec::new();
    for p in paths {
        all.extend(read_feature_csv(&read_text(p)?, window).map_err(data(p.display()))?);
    }
    Ok(all)
}

fn task_model(bundle: &ModelBundle, task: Task) -> (&TaskModel, f64) {
    match task {
        Task::Road => (&bundle.road, 0.0),
        Task::Pothole => (&bundle.pothole, bundle.pothole.svm.threshold),
    }
}

fn json_line<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("report serializes");
    v.push(b'\n');
    v
}

fn cmd_synth(a: &SynthArgs) -> CliResult {
    let config = SynthConfig {
        pothole_count: a.potholes,
        start_t: a.start_t,
        ..SynthConfig::uniform(a.duration, a.condition.into(), a.seed)
    };
    let drive = synth_drive(&config).map_err(data("synth"))?;
    write_output(a.out.as_deref(), drive.log.to_csv().as_bytes())?;
    if let Some(labels) = &a.labels {
        write_output(Some(labels), drive.potholes.to_csv().as_bytes())?;
    }
    eprintln!("synth: {} samples, {} potholes, seed {}", drive.log.len(), drive.potholes.len(), a.seed);
    write_meta(a.out.as_deref(), serde_json::json!({ "command": "synth", "seed": a.seed, "config": config }))
}

fn cmd_featurize(a: &FeaturizeArgs) -> CliResult {
    let size = a.window.unwrap_or(match a.task {
        Task::Road => ROAD_WINDOW,
        Task::Pothole => POTHOLE_WINDOW,
    });
    let log = load_log(&a.log)?;
    let mut windows = make_windows(log.samples(), size).map_err(data(a.log.display()))?;
    if let Some(c) = a.condition {
        attach_condition_label(&mut windows, c.into());
    }
    if let Some(path) = &a.labels {
        let events = parse_pothole_labels(&read_text(path)?).map_err(data(path.display()))?;
        let unmatched = attach_pothole_labels(&mut windows, &events);
        if unmatched > 0 {
            eprintln!("featurize: {unmatched} pothole events fall outside every window");
        }
    }
    eprintln!("featurize: {} windows of {size}", windows.len());
    write_output(a.out.as_deref(), write_feature_csv(&windows).as_bytes())
}

fn cmd_train(a: &TrainArgs) -> CliResult {
    let road_windows = load_features(&a.road, a.road_window)?;
    let pothole_windows = load_features(&a.pothole, a.pothole_window)?;
    let smo = a.solver.params();
    let road_cfg = TrainConfig { window_size: a.road_window, smo, test_fraction: a.test_fraction, seed: a.seed };
    let pothole_cfg = TrainConfig { window_size: a.pothole_window, ..road_cfg };
    let road = train_road(&road_windows, &road_cfg)?;
    let pothole = train_pothole(&pothole_windows, &pothole_cfg, a.min_precision)?;
    let trained_at =
        a.trained_at.unwrap_or_else(|| SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()));
    let bundle = ModelBundle::new(road.model, pothole.model, a.seed, trained_at);
    write_output(Some(&a.out), &save_bundle(&bundle))?;
    eprintln!("train: wrote model {} to {}", bundle.model_version(), a.out.display());
    write_output(None, &json_line(&TrainReport { road: road.report, pothole: pothole.report }))
}

fn cmd_eval(a: &EvalArgs) -> CliResult {
    let bundle = load_bundle_file(&a.bundle.bundle)?;
    let (task, cutoff) = task_model(&bundle, a.task);
    let windows = load_features(&a.features, task.window_size)?;
    let report = evaluate_task(task, &windows, cutoff)?.with_seed(bundle.metadata.seed);
    write_output(None, &json_line(&report))
}

fn cmd_pr_curve(a: &PrCurveArgs) -> CliResult {
    let bundle = load_bundle_file(&a.bundle.bundle)?;
    let (task, _) = task_model(&bundle, a.task);
    let windows = load_features(&a.features, task.window_size)?;
    let curve = task_pr_curve(task, &windows)?;
    write_output(a.out.as_deref(), curve.to_csv().as_bytes())?;
    write_meta(
        a.out.as_deref(),
        serde_json::json!({ "command": "pr-curve", "seed": bundle.metadata.seed, "model_version": bundle.model_version() }),
    )
}

fn cmd_sweep(a: &SweepArgs) -> CliResult {
    let windows = load_features(&a.features, a.window)?;
    let raw = Dataset::from_windows(&windows, None)?;
    let (train, test) = split_dataset(&raw, a.test_fraction, a.seed)?;
    let scaler = Scaler::fit(train.x()).map_err(data("scaler"))?;
    let train = Dataset::new(scaler.apply_all(train.x()), train.y().to_vec())?;
    let test = Dataset::new(scaler.apply_all(test.x()), test.y().to_vec())?;
    let points = sweep_c(&train, &test, &a.grid, &a.solver.params())?;
    let mut csv = String::from("c,train_error,test_error\n");
    for p in &points {
        csv.push_str(&format!("{},{},{}\n", p.c, p.train_error, p.test_error));
    }
    write_output(a.out.as_deref(), csv.as_bytes())?;
    write_meta(
        a.out.as_deref(),
        serde_json::json!({
            "command": "sweep-c", "seed": a.seed, "gamma": a.solver.gamma, "test_fraction": a.test_fraction,
        }),
    )
}

fn cmd_pca(a: &PcaArgs) -> CliResult {
    let windows = load_features(&a.features, ROAD_WINDOW)?;
    let rows: Vec<&[f64]> = windows.iter().map(|w| w.features.as_slice()).collect();
    let scaler = match &a.bundle {
        Some(path) => task_model(&load_bundle_file(path)?, a.task).0.scaler.clone(),
        None => Scaler::fit(&rows).map_err(data("pca"))?,
    };
    let x = scaler.apply_all(&rows);
    let proj = pca_fit(&x, a.k).map_err(data("pca"))?;
    if proj.is_degenerate() {
        eprintln!("pca: features are degenerate; trailing components carry no variance");
    }
    let scores = pca_transform(&proj, &x).map_err(data("pca"))?;
    let labels: Vec<Option<u8>> = windows.iter().map(|w| w.label).collect();
    write_output(a.out.as_deref(), write_scores_csv(&scores, &labels).as_bytes())
}

fn cmd_classify(a: &ClassifyArgs) -> CliResult {
    let bundle = load_bundle_file(&a.bundle.bundle)?;
    let log = load_log(&a.log)?;
    let resp = classify_batch(&bundle, log.samples()).map_err(data(a.log.display()))?;
    let mut body = serde_json::to_vec(&resp).expect("response serializes");
    body.push(b'\n');
    write_output(a.out.as_deref(), &body)
}

fn cmd_serve(a: &ServeArgs) -> CliResult {
    serve(&ServeConfig { addr: a.addr, bundle_path: a.bundle.bundle.clone() }).map_err(data("serve"))
}

fn cmd_replay(a: &ReplayArgs) -> CliResult {
    let log = load_log(&a.log)?;
    let config = ReplayConfig {
        server_url: a.server.clone(),
        chunk_seconds: a.chunk_seconds,
        speedup: a.speedup,
        attempts: a.attempts,
        ..Default::default()
    };
    let outcome = replay_client(log.samples(), &config, &mut std::io::stdout().lock()).map_err(data("replay"))?;
    eprintln!("replay: {} requests", outcome.requests);
    Ok(())
}

fn cmd_map(a: &MapArgs) -> CliResult {
    let resp: ClassifyResponse =
        serde_json::from_str(&read_text(&a.classified)?).map_err(data(a.classified.display()))?;
    let log = load_log(&a.log)?;
    let (road, potholes) = locate_response(&resp, log.samples()).map_err(data("map"))?;
    let geojson = build_map(&road, &potholes).map_err(data("map"))?;
    write_output(Some(&a.out), format!("{geojson}\n").as_bytes())?;
    if let Some(html) = &a.html {
        write_output(Some(html), build_html(&geojson, "Road condition map").as_bytes())?;
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the subcommand,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Synth(a) => cmd_synth(a),
        Command::Featurize(a) => cmd_featurize(a),
        Command::Train(a) => cmd_train(a),
        Command::Eval(a) => cmd_eval(a),
        Command::PrCurve(a) => cmd_pr_curve(a),
        Command::SweepC(a) => cmd_sweep(a),
        Command::Pca(a) => cmd_pca(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Serve(a) => cmd_serve(a),
        Command::Replay(a) => cmd_replay(a),
        Command::Map(a) => cmd_map(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}
