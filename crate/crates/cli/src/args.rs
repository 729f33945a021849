use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "shsr", version, about = "Fit, apply and evaluate sequential group filters for AutoML configuration spaces")]
pub struct Cli {
    /// Log verbosity (error, warn, info, debug, trace); RUST_LOG overrides.
    #[arg(long, global = true, default_value = "warn")]
    pub log_level: String,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the 27 meta-features for one or more CSV datasets.
    ExtractMeta(ExtractMetaArgs),
    /// Fit a filter sequence from run records and meta-features.
    Fit(FitArgs),
    /// Apply a fitted filter sequence to datasets in a meta-feature table.
    Apply(ApplyArgs),
    /// Repeated-holdout evaluation of a filtering policy.
    Evaluate(EvaluateArgs),
    /// Comparison policies.
    #[command(subcommand)]
    Baseline(BaselineCommand),
}

#[derive(Debug, Subcommand)]
pub enum BaselineCommand {
    /// Keep a uniformly random share of the configurations.
    Random(RandomArgs),
    /// Rank configurations for one dataset by ARR over its nearest neighbours.
    Knn(KnnArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Classification,
    Regression,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    Shsr,
    Random,
    Knn,
    Identity,
}

#[derive(Debug, Args, Serialize)]
pub struct ExtractMetaArgs {
    /// Dataset CSV with a header row; the file stem is the dataset id.
    #[arg(long = "data", required = true)]
    pub data: Vec<PathBuf>,
    /// Target column name.
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long, value_enum, default_value = "classification")]
    pub task: Task,
    /// Columns to treat as categorical (comma separated or repeated).
    #[arg(long, value_delimiter = ',')]
    pub categorical: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short = 'o', long = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct FitArgs {
    #[arg(long)]
    pub runs: PathBuf,
    #[arg(long)]
    pub meta: PathBuf,
    #[arg(long)]
    pub threshold: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Count shared costs on every record instead of once per group and dataset.
    #[arg(long)]
    pub no_dedup: bool,
    #[arg(short = 'o', long = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ApplyArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub meta: PathBuf,
    /// Run records whose catalog maps kept groups to configurations.
    #[arg(long)]
    pub runs: Option<PathBuf>,
    #[arg(short = 'o', long = "out")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub runs: PathBuf,
    #[arg(long)]
    pub meta: PathBuf,
    #[arg(long, value_enum, default_value = "shsr")]
    pub policy: PolicyKind,
    /// Thresholds for the shsr policy (comma separated for a sweep).
    #[arg(long, value_delimiter = ',', default_value = "0.999")]
    pub threshold: Vec<f64>,
    /// Result fractions to fit the shsr policy on (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub subsample: Vec<f64>,
    /// Removal fractions for the random policy (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    pub frac: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "3")]
    pub neighbors: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.01")]
    pub accd: Vec<f64>,
    #[arg(long = "top-m", value_delimiter = ',', default_value = "100")]
    pub top_m: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    pub repeats: usize,
    #[arg(long = "test-frac", default_value_t = 0.1)]
    pub test_frac: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub no_dedup: bool,
    #[arg(short = 'o', long = "out", default_value = "report.json")]
    pub out: PathBuf,
    /// Per-dataset CSV (one row per repeat and held-out dataset).
    #[arg(long)]
    pub tidy: Option<PathBuf>,
    /// Plot CSV (one row per repeat plus a mean row with CI widths).
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct RandomArgs {
    #[arg(long)]
    pub runs: PathBuf,
    /// Share of configurations to remove, in [0, 1).
    #[arg(long)]
    pub frac: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short = 'o', long = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct KnnArgs {
    #[arg(long)]
    pub runs: PathBuf,
    #[arg(long)]
    pub meta: PathBuf,
    /// Dataset id (a row of --meta) to recommend for; it is left out of training.
    #[arg(long)]
    pub query: String,
    #[arg(long, default_value_t = 3)]
    pub neighbors: usize,
    #[arg(long, default_value_t = 0.01)]
    pub accd: f64,
    #[arg(long = "top-m", default_value_t = 100)]
    pub top_m: usize,
    #[arg(short = 'o', long = "out")]
    pub out: PathBuf,
}
