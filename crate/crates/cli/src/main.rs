//! `shiftcal`: batch front end for calibration under domain shift.
//!
//! Five subcommands wire the library end to end: `synth` writes scenario
//! datasets, `calibrate` fits a model file, `evaluate` scores models on a
//! target set, `diagnose` computes density-ratio divergence bounds, and
//! `report` merges evaluation tables. Every command is deterministic for a
//! fixed flag set: all randomness flows from `--seed` through named
//! sub-streams, outputs carry no timestamps, and running a command twice
//! produces byte-identical files.
//!
//! Exit codes: 0 success, 1 validation or model error, 2 I/O error. Failures
//! print a single JSON object to stderr: {"error":{"kind","message"}}.

mod commands;
mod envelope;
mod error;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use shiftcal::dataset::DataFormat;

use crate::error::CliError;

#[derive(Parser)]
#[command(
    name = "shiftcal",
    version,
    about = "Confidence calibration under domain shift: fit, evaluate, diagnose"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic multi-domain scenario and write its splits.
    Synth(SynthArgs),
    /// Fit a calibrator on a dataset and write a model file.
    Calibrate(CalibrateArgs),
    /// Score model files on a target dataset with bootstrap resampling.
    Evaluate(EvaluateArgs),
    /// Density-ratio diagnostics between a target and a calibration set.
    Diagnose(DiagnoseArgs),
    /// Merge evaluation tables into one sorted report.
    Report(ReportArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DataFormatArg {
    /// Text: header `domain,label,f0..,z0..`, one sample per row.
    Csv,
    /// The `CSHF` binary layout (bit-exact floats).
    Binary,
}

impl From<DataFormatArg> for DataFormat {
    fn from(f: DataFormatArg) -> DataFormat {
        match f {
            DataFormatArg::Csv => DataFormat::Csv,
            DataFormatArg::Binary => DataFormat::Binary,
        }
    }
}

impl DataFormatArg {
    fn extension(self) -> &'static str {
        match self {
            DataFormatArg::Csv => "csv",
            DataFormatArg::Binary => "cshf",
        }
    }

    fn name(self) -> &'static str {
        match self {
            DataFormatArg::Csv => "csv",
            DataFormatArg::Binary => "binary",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFormatArg {
    Csv,
    Json,
}

impl OutFormatArg {
    fn name(self) -> &'static str {
        match self {
            OutFormatArg::Csv => "csv",
            OutFormatArg::Json => "json",
        }
    }
}

/// Calibrator kinds, spelled exactly as they appear in model files.
#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    #[value(name = "uncalibrated")]
    Uncalibrated,
    #[value(name = "source_only")]
    SourceOnly,
    #[value(name = "target_oracle")]
    TargetOracle,
    #[value(name = "set_level")]
    SetLevel,
    #[value(name = "cluster_nn")]
    ClusterNn,
    #[value(name = "cluster_regression")]
    ClusterRegression,
    #[value(name = "ensemble")]
    Ensemble,
}

fn parse_bounds(text: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err("expected 'lo,hi'".into());
    }
    let lo: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| format!("'{}' is not a number", parts[0]))?;
    let hi: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| format!("'{}' is not a number", parts[1]))?;
    if !lo.is_finite() || !hi.is_finite() || lo <= 0.0 || lo >= hi {
        return Err(format!("bounds need 0 < lo < hi, got {lo},{hi}"));
    }
    Ok((lo, hi))
}

#[derive(Args)]
struct SynthArgs {
    /// Built-in scenario: bridge, near, or control.
    #[arg(long, required_unless_present = "config", conflicts_with = "config")]
    preset: Option<String>,
    /// TOML scenario config (same shape `synth` writes to config.toml).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the preset's or config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Dataset file format for the written splits.
    #[arg(long, value_enum, default_value_t = DataFormatArg::Csv)]
    data_format: DataFormatArg,
    /// Directory for the split files (created if missing).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CalibrateArgs {
    /// Dataset to fit on.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = DataFormatArg::Csv)]
    data_format: DataFormatArg,
    /// Calibrator kind to fit.
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Cluster count for the cluster methods.
    #[arg(long, default_value_t = 8)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Temperature search interval 'lo,hi'; also the regression clamp range.
    #[arg(long, value_parser = parse_bounds, default_value = "0.01,100")]
    bounds: (f64, f64),
    /// Search tolerance in log-temperature space.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Ridge penalty for cluster regression (default: 1e-3 per feature dim).
    #[arg(long)]
    ridge: Option<f64>,
    /// Clusters smaller than this inherit the pooled temperature.
    #[arg(long, default_value_t = 10)]
    min_cluster_size: usize,
    /// Weight each domain equally instead of each sample.
    #[arg(long)]
    per_domain: bool,
    /// Z-score features before fitting; the transform is stored in the model.
    #[arg(long)]
    standardize: bool,
    /// Model file to write (JSON).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Target dataset to score on.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = DataFormatArg::Csv)]
    data_format: DataFormatArg,
    /// Model file; repeat to score several methods in one run. The
    /// uncalibrated baseline is always included.
    #[arg(long = "model", required = true)]
    models: Vec<PathBuf>,
    /// ECE bin count.
    #[arg(long, default_value_t = 15)]
    bins: usize,
    /// Bootstrap trials.
    #[arg(long, default_value_t = 1000)]
    n_trials: usize,
    /// Samples per trial (default: the dataset size, capped at 1500).
    #[arg(long)]
    trial_size: Option<usize>,
    /// Draw trials with replacement instead of as distinct-index subsamples.
    #[arg(long)]
    with_replacement: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = OutFormatArg::Csv)]
    format: OutFormatArg,
    /// Also write per-bin reliability rows (CSV) for plotting.
    #[arg(long)]
    per_bin_out: Option<PathBuf>,
    /// Report file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DiagnoseArgs {
    /// Target dataset (histogram mode; needs --cal).
    #[arg(long, requires = "cal")]
    target: Option<PathBuf>,
    /// Calibration dataset (histogram mode).
    #[arg(long, requires = "target")]
    cal: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = DataFormatArg::Csv)]
    data_format: DataFormatArg,
    /// Feature coordinate to project onto in histogram mode.
    #[arg(long, default_value_t = 0)]
    projection: usize,
    /// Histogram bin count.
    #[arg(long, default_value_t = 15)]
    bins: usize,
    /// Additive pseudo-count per bin (0 keeps empirical frequencies).
    #[arg(long, default_value_t = 0.0)]
    smoothing: f64,
    /// Target distribution JSON (distribution mode; needs --cal-dist).
    #[arg(long, requires = "cal_dist", conflicts_with_all = ["target", "cal"])]
    target_dist: Option<PathBuf>,
    /// Calibration distribution JSON (distribution mode).
    #[arg(long, requires = "target_dist", conflicts_with_all = ["target", "cal"])]
    cal_dist: Option<PathBuf>,
    /// Per-point losses as a JSON array over the support (default: zeros).
    #[arg(long)]
    losses: Option<PathBuf>,
    /// Diagnostics JSON to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// Evaluation CSV; repeat to merge several.
    #[arg(long = "input", required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutFormatArg::Csv)]
    format: OutFormatArg,
    /// Merged report to write.
    #[arg(long)]
    out: PathBuf,
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Synth(args) => commands::synth::run(args),
        Command::Calibrate(args) => commands::calibrate::run(args),
        Command::Evaluate(args) => commands::evaluate::run(args),
        Command::Diagnose(args) => commands::diagnose::run(args),
        Command::Report(args) => commands::report::run(args),
    }
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version render on stdout and exit 0; usage errors go
            // to stderr and exit 1, keeping 2 reserved for I/O failures.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("{}", err.to_stderr_json());
            err.exit_code()
        }
    }
}

fn main() {
    std::process::exit(run());
}
