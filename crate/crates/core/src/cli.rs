//! Command-line front end: `track`, `eval`, `bench` and `synth`.
//!
//! Every subcommand accepts `--config <file>` with `key = value` lines.
//! Explicit flags override the file, the file overrides built-in defaults,
//! and unknown keys are rejected. Exit codes: 0 success, 1 processing
//! error, 2 usage or input error.

use crate::bench;
use crate::geometry::BBox;
use crate::kalman::{FilterParams, MEAS_DIM, STATE_DIM};
use crate::metrics::{self, EvalOptions, MetricsReport, MostlyTrackedMode};
use crate::mot_io::{self, Detection, MotIoError, SequenceSpec};
use crate::synth::{self, ScenarioConfig, SyntheticSequence};
use crate::tracker::{TrackOutput, TrackerConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Processing(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Processing(_) => 1,
            CliError::Usage(_) | CliError::Input(_) => 2,
        }
    }
}

impl From<MotIoError> for CliError {
    fn from(e: MotIoError) -> Self {
        match e {
            MotIoError::Io(_) => CliError::Processing(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

fn write_error(path: &Path, e: io::Error) -> CliError {
    CliError::Processing(format!("{}: {e}", path.display()))
}

#[derive(Debug, Parser)]
#[command(
    name = "sortrack",
    version,
    about = "Online multi-object tracker and CLEAR-MOT evaluator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Track a det.txt file, a sequence directory or a directory of sequences.
    Track(TrackArgs),
    /// Score tracker output against ground truth.
    Eval(EvalArgs),
    /// Measure tracking throughput (frames per second).
    Bench(BenchArgs),
    /// Write a synthetic sequence (det/det.txt, gt/gt.txt, seqinfo.ini).
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct TrackerFlags {
    /// Minimum IOU for a detection to update a track [default: 0.3]
    #[arg(long)]
    pub iou_min: Option<f64>,
    /// Missed frames a track survives before deletion [default: 1]
    #[arg(long)]
    pub max_age: Option<u32>,
    /// Consecutive hits before a track is reported [default: 3]
    #[arg(long)]
    pub min_hits: Option<u32>,
    /// Drop detections with confidence <= this value [default: 0.5]
    #[arg(long)]
    pub conf_thresh: Option<f64>,
    /// Do not report probationary tracks during the first min_hits frames
    #[arg(long)]
    pub no_warmup: bool,
    /// key = value overrides; explicit flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrackArgs {
    pub input: PathBuf,
    /// Result file, or a directory when the input holds several sequences
    #[arg(short, long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub tracker: TrackerFlags,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// gt.txt, a sequence directory, or a directory of sequences
    pub gt: PathBuf,
    /// Result file, or a directory of <sequence>.txt files
    pub results: PathBuf,
    /// Print comma-separated values instead of a table
    #[arg(long)]
    pub csv: bool,
    /// Count mostly-tracked by the single most frequent hypothesis id
    #[arg(long)]
    pub mt_strict: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ScenarioFlags {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub objects: Option<usize>,
    #[arg(long)]
    pub frames: Option<u64>,
    /// Gaussian corner noise, px
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub dropout: Option<f64>,
    /// Mean false positives per frame
    #[arg(long)]
    pub fp_rate: Option<f64>,
    #[arg(long)]
    pub crossing: bool,
    #[arg(long)]
    pub occlusion: bool,
    #[arg(long)]
    pub keep_in_view: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Detection file to replay instead of a synthetic stream
    #[arg(long)]
    pub det: Option<PathBuf>,
    /// Ground truth for the replayed detections
    #[arg(long, requires = "det")]
    pub gt: Option<PathBuf>,
    #[arg(long)]
    pub repetitions: Option<usize>,
    /// Print "hz,mota" only
    #[arg(long)]
    pub csv: bool,
    #[command(flatten)]
    pub tracker: TrackerFlags,
    #[command(flatten)]
    pub scenario: ScenarioFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Default,
    Clean,
    Occlusion,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = Preset::Default)]
    pub preset: Preset,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub scenario: ScenarioFlags,
}

/// Parses argv, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Track(a) => cmd_track(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::Bench(a) => cmd_bench(&a),
        Command::Synth(a) => cmd_synth(&a),
    }
}

// ---- config file ---------------------------------------------------------

const KNOWN_KEYS: &[&str] = &[
    "iou_min",
    "max_age",
    "min_hits",
    "conf_thresh",
    "warmup",
    "q",
    "r",
    "p0",
    "seed",
    "objects",
    "frames",
    "noise",
    "dropout",
    "fp_rate",
    "crossing",
    "occlusion",
    "keep_in_view",
    "speed_min",
    "speed_max",
    "width_min",
    "width_max",
    "height_min",
    "height_max",
    "image_width",
    "image_height",
    "repetitions",
];

/// Parsed `key = value` file. Blank lines and `#` comments are ignored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", i + 1)))?;
            let key = k.trim().replace('-', "_");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!("config line {}: unknown key {key:?}", i + 1)));
            }
            entries.insert(key, v.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
                Self::parse(&text)
            }
        }
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("config key {key}: invalid value {v:?}"))),
        }
    }

    fn get_list<const N: usize>(&self, key: &str) -> Result<Option<[f64; N]>, CliError> {
        let Some(v) = self.entries.get(key) else {
            return Ok(None);
        };
        let values: Result<Vec<f64>, _> = v.split(',').map(|x| x.trim().parse::<f64>()).collect();
        match values {
            Ok(vals) if vals.len() == N => Ok(Some(std::array::from_fn(|i| vals[i]))),
            _ => Err(CliError::Usage(format!(
                "config key {key}: expected {N} comma-separated numbers"
            ))),
        }
    }
}

/// Tracker settings and confidence gate after merging defaults, file and flags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub tracker: TrackerConfig,
    pub conf_thresh: f64,
}

impl RunConfig {
    pub fn resolve(flags: &TrackerFlags, file: &ConfigFile) -> Result<Self, CliError> {
        let mut tracker = TrackerConfig::default();
        let mut conf_thresh = 0.5;

        if let Some(v) = file.get("iou_min")? {
            tracker.iou_min = v;
        }
        if let Some(v) = file.get("max_age")? {
            tracker.max_age = v;
        }
        if let Some(v) = file.get("min_hits")? {
            tracker.min_hits = v;
        }
        if let Some(v) = file.get("conf_thresh")? {
            conf_thresh = v;
        }
        if let Some(v) = file.get("warmup")? {
            tracker.warmup = v;
        }
        let q = file.get_list::<STATE_DIM>("q")?;
        let r = file.get_list::<MEAS_DIM>("r")?;
        let p0 = file.get_list::<STATE_DIM>("p0")?;
        if q.is_some() || r.is_some() || p0.is_some() {
            tracker.filter = FilterParams::from_diagonals(
                &q.unwrap_or(crate::kalman::DEFAULT_PROCESS_NOISE),
                &r.unwrap_or(crate::kalman::DEFAULT_MEASUREMENT_NOISE),
                &p0.unwrap_or(crate::kalman::DEFAULT_INITIAL_COVARIANCE),
            )
            .map_err(|e| CliError::Usage(e.to_string()))?;
        }

        if let Some(v) = flags.iou_min {
            tracker.iou_min = v;
        }
        if let Some(v) = flags.max_age {
            tracker.max_age = v;
        }
        if let Some(v) = flags.min_hits {
            tracker.min_hits = v;
        }
        if let Some(v) = flags.conf_thresh {
            conf_thresh = v;
        }
        if flags.no_warmup {
            tracker.warmup = false;
        }

        tracker.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        if !conf_thresh.is_finite() {
            return Err(CliError::Usage("conf_thresh must be finite".into()));
        }
        Ok(Self { tracker, conf_thresh })
    }
}

fn resolve_scenario(
    base: ScenarioConfig,
    flags: &ScenarioFlags,
    file: &ConfigFile,
) -> Result<ScenarioConfig, CliError> {
    let mut c = base;
    macro_rules! from_file {
        ($key:literal, $field:expr) => {
            if let Some(v) = file.get($key)? {
                $field = v;
            }
        };
    }
    from_file!("seed", c.seed);
    from_file!("objects", c.num_objects);
    from_file!("frames", c.num_frames);
    from_file!("noise", c.noise_sigma);
    from_file!("dropout", c.dropout);
    from_file!("fp_rate", c.fp_rate);
    from_file!("crossing", c.crossing);
    from_file!("occlusion", c.occlusion);
    from_file!("keep_in_view", c.keep_in_view);
    from_file!("speed_min", c.speed.0);
    from_file!("speed_max", c.speed.1);
    from_file!("width_min", c.box_width.0);
    from_file!("width_max", c.box_width.1);
    from_file!("height_min", c.box_height.0);
    from_file!("height_max", c.box_height.1);
    from_file!("image_width", c.image_width);
    from_file!("image_height", c.image_height);

    if let Some(v) = flags.seed {
        c.seed = v;
    }
    if let Some(v) = flags.objects {
        c.num_objects = v;
    }
    if let Some(v) = flags.frames {
        c.num_frames = v;
    }
    if let Some(v) = flags.noise {
        c.noise_sigma = v;
    }
    if let Some(v) = flags.dropout {
        c.dropout = v;
    }
    if let Some(v) = flags.fp_rate {
        c.fp_rate = v;
    }
    c.crossing |= flags.crossing;
    c.occlusion |= flags.occlusion;
    c.keep_in_view |= flags.keep_in_view;
    c.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(c)
}

// ---- track ---------------------------------------------------------------

/// Result of tracking one detection stream.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackRun {
    pub outputs: Vec<TrackOutput>,
    pub frames: u64,
    pub hz: f64,
}

/// Applies the confidence gate and runs the tracker; only the tracking loop is timed.
pub fn track_detections(dets: Vec<Detection>, frame_count: u64, config: &RunConfig) -> Result<TrackRun, CliError> {
    let dets = mot_io::filter_confidence(dets, config.conf_thresh);
    let frames = mot_io::group_by_frame(&dets, frame_count)?;
    let result = bench::measure(&frames, config.tracker, 1).map_err(|e| CliError::Processing(e.to_string()))?;
    Ok(TrackRun {
        outputs: result.outputs,
        frames: result.frames,
        hz: result.median_hz,
    })
}

fn write_result_file(path: &Path, outputs: &[TrackOutput]) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| write_error(parent, e))?;
    }
    let file = fs::File::create(path).map_err(|e| write_error(path, e))?;
    mot_io::write_results(outputs, BufWriter::new(file)).map_err(|e| write_error(path, e))
}

fn track_sequence(seq: &SequenceSpec, config: &RunConfig) -> Result<TrackRun, CliError> {
    let file = mot_io::read_mot_file(&seq.det_path)?;
    track_detections(file.detections(), seq.frame_count, config)
}

pub fn cmd_track(args: &TrackArgs) -> Result<(), CliError> {
    let file = ConfigFile::load(args.tracker.config.as_deref())?;
    let config = RunConfig::resolve(&args.tracker, &file)?;
    let input = &args.input;
    if !input.exists() {
        return Err(CliError::Input(format!(
            "{}: no such file or directory",
            input.display()
        )));
    }

    if input.is_file() || mot_io::is_sequence_dir(input) {
        let (name, run) = if input.is_file() {
            let f = mot_io::read_mot_file(input)?;
            if f.rejected > 0 {
                eprintln!(
                    "warning: {}: skipped {} records with negative size",
                    input.display(),
                    f.rejected
                );
            }
            (
                input.display().to_string(),
                track_detections(f.detections(), 0, &config)?,
            )
        } else {
            let seq = mot_io::load_sequence(input)?;
            let run = track_sequence(&seq, &config)?;
            (seq.name, run)
        };
        write_result_file(&args.output, &run.outputs)?;
        eprintln!("{name}: {} frames, {:.1} Hz", run.frames, run.hz);
        return Ok(());
    }

    let sequences = mot_io::discover_sequences(input)?;
    if sequences.is_empty() {
        return Err(CliError::Input(format!(
            "{}: no sequences (expected <seq>/det/det.txt)",
            input.display()
        )));
    }
    fs::create_dir_all(&args.output).map_err(|e| write_error(&args.output, e))?;
    let runs: Vec<Result<TrackRun, CliError>> = sequences
        .par_iter()
        .map(|seq| {
            let run = track_sequence(seq, &config)?;
            write_result_file(&seq.result_path(&args.output), &run.outputs)?;
            Ok(run)
        })
        .collect();
    let (mut frames, mut secs) = (0u64, 0.0f64);
    for (seq, run) in sequences.iter().zip(runs) {
        let run = run?;
        eprintln!("{}: {} frames, {:.1} Hz", seq.name, run.frames, run.hz);
        frames += run.frames;
        if run.hz > 0.0 {
            secs += run.frames as f64 / run.hz;
        }
    }
    if secs > 0.0 {
        eprintln!("total: {frames} frames, {:.1} Hz", frames as f64 / secs);
    }
    Ok(())
}

// ---- eval ----------------------------------------------------------------

fn gt_file(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join("gt").join("gt.txt")
    } else {
        path.to_path_buf()
    }
}

fn read_required(path: &Path, what: &str) -> Result<mot_io::MotFile, CliError> {
    if !path.is_file() {
        return Err(CliError::Input(format!("{what} file not found: {}", path.display())));
    }
    Ok(mot_io::read_mot_file(path)?)
}

/// Evaluates one result file against one ground-truth file.
pub fn evaluate_files(
    gt_path: &Path,
    results_path: &Path,
    num_frames: Option<u64>,
    mt_mode: MostlyTrackedMode,
) -> Result<MetricsReport, CliError> {
    let gt_file = read_required(gt_path, "ground-truth")?;
    let res_file = read_required(results_path, "results")?;
    let gt = gt_file.gt_entries()?;
    let results = res_file.track_outputs();
    let gt_last = gt_file.max_frame();
    let res_last = res_file.max_frame();
    if res_last > num_frames.unwrap_or(gt_last).max(gt_last) {
        eprintln!(
            "warning: {} has frames up to {res_last} but ground truth ends at {gt_last}",
            results_path.display()
        );
    }
    let options = EvalOptions {
        mt_mode,
        num_frames: num_frames.or(Some(gt_last.max(res_last))),
        ..EvalOptions::default()
    };
    metrics::evaluate(&gt, &results, &options).map_err(|e| CliError::Processing(e.to_string()))
}

fn gt_sequences(root: &Path) -> Result<Vec<(String, PathBuf, Option<u64>)>, CliError> {
    let entries = fs::read_dir(root).map_err(|e| CliError::Input(format!("{}: {e}", root.display())))?;
    let mut out = Vec::new();
    for entry in entries {
        let dir = entry.map_err(|e| CliError::Input(e.to_string()))?.path();
        let gt = dir.join("gt").join("gt.txt");
        if dir.is_dir() && gt.is_file() {
            let name = dir.file_name().unwrap_or_default().to_string_lossy().into_owned();
            let frames = if mot_io::is_sequence_dir(&dir) {
                Some(mot_io::load_sequence(&dir)?.frame_count).filter(|&n| n > 0)
            } else {
                None
            };
            out.push((name, gt, frames));
        }
    }
    out.sort();
    Ok(out)
}

pub fn cmd_eval(args: &EvalArgs) -> Result<(), CliError> {
    let mode = if args.mt_strict {
        MostlyTrackedMode::SameLabel
    } else {
        MostlyTrackedMode::Coverage
    };
    if !args.gt.exists() {
        return Err(CliError::Input(format!(
            "ground-truth file not found: {}",
            args.gt.display()
        )));
    }

    let rows: Vec<(String, MetricsReport)> = if args.results.is_dir() {
        let seqs = gt_sequences(&args.gt)?;
        if seqs.is_empty() {
            return Err(CliError::Input(format!(
                "{}: no <seq>/gt/gt.txt found",
                args.gt.display()
            )));
        }
        let reports: Vec<Result<(String, MetricsReport), CliError>> = seqs
            .par_iter()
            .map(|(name, gt, frames)| {
                let res = args.results.join(format!("{name}.txt"));
                Ok((name.clone(), evaluate_files(gt, &res, *frames, mode)?))
            })
            .collect();
        let mut rows = reports.into_iter().collect::<Result<Vec<_>, _>>()?;
        let overall: Vec<MetricsReport> = rows.iter().map(|(_, r)| *r).collect();
        let total = metrics::aggregate(&overall).map_err(|e| CliError::Processing(e.to_string()))?;
        rows.push(("OVERALL".into(), total));
        rows
    } else {
        let gt = gt_file(&args.gt);
        let frames = if args.gt.is_dir() && mot_io::is_sequence_dir(&args.gt) {
            Some(mot_io::load_sequence(&args.gt)?.frame_count).filter(|&n| n > 0)
        } else {
            None
        };
        let report = evaluate_files(&gt, &args.results, frames, mode)?;
        let name = args
            .results
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "results".into());
        vec![(name, report)]
    };

    let text = if args.csv {
        metrics::format_csv(&rows)
    } else {
        metrics::format_table(&rows)
    };
    print!("{text}");
    Ok(())
}

// ---- bench ---------------------------------------------------------------

/// Synthetic stream used by `bench` when no detection file is given: every
/// object stays in view for the whole run, one horizontal lane each.
pub fn bench_scenario(num_objects: usize, num_frames: u64, seed: u64) -> ScenarioConfig {
    let lane_height = 110.0;
    let travel = 1800.0 / num_frames.max(2) as f64;
    ScenarioConfig {
        num_objects,
        num_frames,
        speed: (0.1 * travel.min(15.0), travel.min(15.0)),
        box_width: (30.0, 60.0),
        box_height: (50.0, 100.0),
        image_width: 1920.0,
        image_height: (num_objects as f64 * lane_height).max(1080.0),
        keep_in_view: true,
        seed,
        ..ScenarioConfig::default()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub result: bench::BenchResult,
    pub mota: Option<f64>,
}

pub fn run_bench(
    dets: &[Detection],
    gt: Option<&[mot_io::GtEntry]>,
    frame_count: u64,
    config: &RunConfig,
    repetitions: usize,
) -> Result<BenchReport, CliError> {
    let dets = mot_io::filter_confidence(dets.to_vec(), config.conf_thresh);
    let frames = mot_io::group_by_frame(&dets, frame_count)?;
    let result =
        bench::measure(&frames, config.tracker, repetitions).map_err(|e| CliError::Processing(e.to_string()))?;
    let mota = match gt {
        Some(gt) => {
            let opts = EvalOptions {
                num_frames: Some(result.frames),
                ..EvalOptions::default()
            };
            let r = metrics::evaluate(gt, &result.outputs, &opts).map_err(|e| CliError::Processing(e.to_string()))?;
            Some(r.mota)
        }
        None => None,
    };
    Ok(BenchReport { result, mota })
}

pub fn cmd_bench(args: &BenchArgs) -> Result<(), CliError> {
    let file = ConfigFile::load(args.tracker.config.as_deref())?;
    let config = RunConfig::resolve(&args.tracker, &file)?;
    let repetitions = match args.repetitions {
        Some(r) => r,
        None => file.get("repetitions")?.unwrap_or(5),
    };
    if repetitions == 0 {
        return Err(CliError::Usage("repetitions must be >= 1".into()));
    }

    let (source, report) = if let Some(det) = &args.det {
        let dets = read_required(det, "detection")?.detections();
        let gt = match &args.gt {
            Some(p) => Some(read_required(p, "ground-truth")?.gt_entries()?),
            None => None,
        };
        (
            det.display().to_string(),
            run_bench(&dets, gt.as_deref(), 0, &config, repetitions)?,
        )
    } else {
        let objects = args.scenario.objects.or(file.get("objects")?).unwrap_or(10);
        let frames = args.scenario.frames.or(file.get("frames")?).unwrap_or(1000);
        let seed = args.scenario.seed.or(file.get("seed")?).unwrap_or(0);
        let base = bench_scenario(objects, frames, seed);
        let scenario = resolve_scenario(base, &args.scenario, &file)?;
        let seq = synth::generate(&scenario).map_err(|e| CliError::Usage(e.to_string()))?;
        let report = run_bench(&seq.detections, Some(&seq.gt), seq.num_frames, &config, repetitions)?;
        (format!("synthetic {objects} objects"), report)
    };

    let r = &report.result;
    let mota = report.mota.map(|m| format!("{:.1}", m * 100.0)).unwrap_or_default();
    if args.csv {
        println!("hz,mota");
        println!("{:.1},{mota}", r.median_hz);
    } else {
        let lo = r.runs_hz.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = r.runs_hz.iter().cloned().fold(0.0, f64::max);
        println!(
            "{source}: {} frames x {} repetitions, median {:.1} Hz (min {lo:.1}, max {hi:.1})",
            r.frames,
            r.runs_hz.len(),
            r.median_hz
        );
        if report.mota.is_some() {
            println!("point: hz={:.1} mota={mota}", r.median_hz);
        } else {
            println!("point: hz={:.1}", r.median_hz);
        }
    }
    Ok(())
}

// ---- synth ---------------------------------------------------------------

pub fn write_sequence(dir: &Path, name: &str, seq: &SyntheticSequence) -> Result<(), CliError> {
    let det_dir = dir.join("det");
    let gt_dir = dir.join("gt");
    for d in [&det_dir, &gt_dir] {
        fs::create_dir_all(d).map_err(|e| write_error(d, e))?;
    }
    let det_path = det_dir.join("det.txt");
    let f = fs::File::create(&det_path).map_err(|e| write_error(&det_path, e))?;
    mot_io::write_detections(&seq.detections, BufWriter::new(f)).map_err(|e| write_error(&det_path, e))?;
    let gt_path = gt_dir.join("gt.txt");
    let f = fs::File::create(&gt_path).map_err(|e| write_error(&gt_path, e))?;
    mot_io::write_gt(&seq.gt, BufWriter::new(f)).map_err(|e| write_error(&gt_path, e))?;
    let ini = dir.join("seqinfo.ini");
    let mut f = fs::File::create(&ini).map_err(|e| write_error(&ini, e))?;
    writeln!(f, "[Sequence]\nname={name}\nseqLength={}", seq.num_frames).map_err(|e| write_error(&ini, e))?;
    Ok(())
}

/// Snaps boxes to the two-decimal grid used on disk so that a written
/// sequence parses back to exactly the same values.
fn quantize(seq: &mut SyntheticSequence) {
    let q = |b: &BBox| {
        let [l, t, w, h] = b.to_ltwh().map(|v| (v * 100.0).round() / 100.0);
        BBox::from_ltwh(l, t, w, h).expect("rounded box stays valid")
    };
    for g in &mut seq.gt {
        g.bbox = q(&g.bbox);
    }
    for d in &mut seq.detections {
        d.bbox = q(&d.bbox);
    }
}

pub fn cmd_synth(args: &SynthArgs) -> Result<(), CliError> {
    let file = ConfigFile::load(args.config.as_deref())?;
    let mut seq = match args.preset {
        Preset::Occlusion => synth::occlusion_scenario().sequence,
        preset => {
            let base = if preset == Preset::Clean {
                ScenarioConfig::clean()
            } else {
                ScenarioConfig::default()
            };
            let cfg = resolve_scenario(base, &args.scenario, &file)?;
            synth::generate(&cfg).map_err(|e| CliError::Usage(e.to_string()))?
        }
    };
    quantize(&mut seq);
    let name = args
        .output
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "synthetic".into());
    write_sequence(&args.output, &name, &seq)?;
    eprintln!(
        "{}: {} frames, {} gt boxes, {} detections",
        args.output.display(),
        seq.num_frames,
        seq.gt.len(),
        seq.detections.len()
    );
    Ok(())
}
