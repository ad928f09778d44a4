//! Command-line front end for `kmo-match`: scene generation, matching,
//! evaluation and timing over JSON scene files.
//!
//! [`run`] holds the whole program so it can be driven in-process; the binary
//! is a thin wrapper around it.

mod bench;
mod error;
mod eval;
mod format;
mod gen;
mod matching;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use error::CliError;
pub use format::{GtRecord, PredRecord, SceneDoc, SceneFile, SCHEMA};

/// Environment variable consulted when `--parallelism` is not given.
pub const THREADS_ENV: &str = "KMO_MATCH_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "kmo-match",
    version,
    about = "Point-set matching with neighbor-context costs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate synthetic scenes with ground truth and perturbed predictions.
    Gen(GenArgs),
    /// Match predictions to ground truth scene by scene.
    Match(MatchArgs),
    /// Score localization and counting.
    Eval(EvalArgs),
    /// Time cost construction plus assignment on random instances.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PatternArg {
    Grid,
    Clusters,
    Uniform,
    /// Dense cluster with isolated heads; predictions come from the fixture.
    TwoDensity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConfArg {
    Const,
    Noisy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CostArg {
    L1,
    Kmo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KnnSourceArg {
    Computed,
    Supplied,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SigmaModeArg {
    Fixed,
    Nwpu,
    Qnrf,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "uniform")]
    pattern: PatternArg,
    /// Points per scene (grids round down to a full lattice).
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 10.0)]
    spacing: f64,
    /// Grid origin as `x,y`.
    #[arg(long, default_value = "0,0", value_parser = parse_pair)]
    origin: (f64, f64),
    #[arg(long, default_value_t = 256.0)]
    width: f64,
    #[arg(long, default_value_t = 256.0)]
    height: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of scenes; scene `i` uses seed `seed + i`.
    #[arg(long, default_value_t = 1)]
    scenes: usize,
    /// Cluster centers as `x,y;x,y;...` (default: frame center).
    #[arg(long)]
    centers: Option<String>,
    #[arg(long, default_value_t = 10.0)]
    spread: f64,
    /// Head box attached to every ground-truth point.
    #[arg(long = "box", num_args = 2, value_names = ["W", "H"])]
    head_box: Option<Vec<f64>>,
    /// Per-coordinate Gaussian jitter of predictions, pixels.
    #[arg(long, default_value_t = 0.0)]
    jitter: f64,
    #[arg(long, default_value_t = 0.0)]
    drop_rate: f64,
    #[arg(long, default_value_t = 0.0)]
    spurious_rate: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    dx: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    dy: f64,
    #[arg(long, value_enum, default_value = "const")]
    conf: ConfArg,
    /// Confidence used by `--conf const`.
    #[arg(long, default_value_t = 1.0)]
    conf_value: f64,
    #[arg(long, default_value_t = 0.8)]
    conf_mean: f64,
    #[arg(long, default_value_t = 0.1)]
    conf_sd: f64,
    /// Write ground truth only.
    #[arg(long)]
    no_pred: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MatchArgs {
    /// Scene file providing ground truth.
    #[arg(long)]
    gt: PathBuf,
    /// Scene file providing predictions.
    #[arg(long)]
    pred: PathBuf,
    #[arg(long, value_enum, default_value = "kmo")]
    cost: CostArg,
    #[arg(long, default_value_t = kmo_match::matcher::DEFAULT_K)]
    k: usize,
    #[arg(long, value_enum, default_value = "computed")]
    knn_source: KnnSourceArg,
    /// Also match under both costs and record where they disagree.
    #[arg(long)]
    compare: bool,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    parallelism: Option<usize>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    gt: PathBuf,
    #[arg(long)]
    pred: PathBuf,
    #[arg(long, value_enum, default_value = "fixed")]
    sigma_mode: SigmaModeArg,
    /// Radius for `--sigma-mode fixed`, pixels.
    #[arg(long, default_value_t = 8.0)]
    sigma: f64,
    /// Predictions scoring below this are discarded.
    #[arg(long, default_value_t = kmo_match::eval::DEFAULT_TAU)]
    tau: f64,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    parallelism: Option<usize>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Predictions per instance; ground truth is half of it.
    #[arg(long, default_value_t = 500)]
    n: usize,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "kmo")]
    cost: CostArg,
    #[arg(long)]
    report: Option<PathBuf>,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected x,y, got {s:?}"))?;
    let x = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let y = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((x, y))
}

fn usage(flag: &str, msg: &str) -> CliError {
    CliError::Usage(format!("invalid value for --{flag}: {msg}"))
}

/// Writes the JSON either to `path` (summary on stdout) or to stdout (summary on stderr).
fn emit(
    path: Option<&Path>,
    json: &str,
    summary: &str,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let console = |e: std::io::Error| CliError::Internal(format!("cannot write to console: {e}"));
    match path {
        Some(p) => {
            std::fs::write(p, json).map_err(|e| CliError::io(p, e))?;
            writeln!(stdout, "{summary}").map_err(console)
        }
        None => {
            stdout.write_all(json.as_bytes()).map_err(console)?;
            writeln!(stderr, "{summary}").map_err(console)
        }
    }
}

fn thread_pool(parallelism: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let n = match parallelism {
        Some(n) => n,
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a non-negative integer, got {v:?}")))?,
            Err(_) => 0,
        },
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))
}

/// Runs the program on `args` (including the program name) and returns the exit code.
///
/// Exit codes: 0 success, 2 usage or validation, 3 data or schema, 4 I/O or internal.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                2
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    let result = match cli.command {
        Command::Gen(a) => gen::run(&a, stdout, stderr),
        Command::Match(a) => matching::run(&a, stdout, stderr),
        Command::Eval(a) => eval::run(&a, stdout, stderr),
        Command::Bench(a) => bench::run(&a, stdout, stderr),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
