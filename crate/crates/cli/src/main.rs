//! `consensus`: command-line front end for consensus clustering experiments.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use consensus_core::ensemble::EmptyClusterPolicy;
use consensus_core::oracle::Suite;

#[derive(Debug, Parser)]
#[command(
    name = "consensus",
    version,
    about = "Consensus clustering in the space of partitions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", content = "parameters", rename_all = "kebab-case")]
pub enum Command {
    /// Generate a synthetic dataset CSV.
    GenData(GenDataArgs),
    /// Build a k-means ensemble from a dataset.
    Ensemble(EnsembleArgs),
    /// Compute a mean partition of an ensemble.
    Mean(MeanArgs),
    /// Extract consensus motifs from an ensemble.
    Motifs(MotifsArgs),
    /// Cluster-instability scores over a range of k.
    Stability(StabilityArgs),
    /// Compare fast routines against exhaustive oracles.
    Oracle(OracleArgs),
    /// Repeat the run recorded in a manifest.
    #[serde(skip)]
    Rerun(RerunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataKind {
    GaussianGrid,
    Uniform,
}

/// Synthetic data source. Grid flags and uniform flags are exclusive.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct GeneratorArgs {
    #[arg(long, value_enum)]
    pub kind: Option<DataKind>,
    /// Grid rows (gaussian-grid).
    #[arg(long)]
    pub rows: Option<usize>,
    /// Grid columns (gaussian-grid).
    #[arg(long)]
    pub cols: Option<usize>,
    /// Per-coordinate standard deviation (gaussian-grid, default 0.12).
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Points per grid component (gaussian-grid, default 100).
    #[arg(long)]
    pub points_per: Option<usize>,
    /// Number of points (uniform).
    #[arg(long)]
    pub m: Option<usize>,
    /// Dimension (uniform, default 2).
    #[arg(long)]
    pub d: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GenDataArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub generator: GeneratorArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmptyPolicyArg {
    FarthestPoint,
    LeaveEmpty,
}

impl From<EmptyPolicyArg> for EmptyClusterPolicy {
    fn from(p: EmptyPolicyArg) -> Self {
        match p {
            EmptyPolicyArg::FarthestPoint => EmptyClusterPolicy::FarthestPoint,
            EmptyPolicyArg::LeaveEmpty => EmptyClusterPolicy::LeaveEmpty,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct KMeansArgs {
    /// Lloyd runs per member; the lowest inertia wins.
    #[arg(long, default_value_t = 2)]
    pub n_init: usize,
    #[arg(long, default_value_t = 100)]
    pub kmeans_max_iters: usize,
    #[arg(long, value_enum, default_value_t = EmptyPolicyArg::FarthestPoint)]
    pub empty_clusters: EmptyPolicyArg,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 4)]
    pub restarts: usize,
    #[arg(long, default_value_t = 200)]
    pub max_iters: usize,
    /// Stop once the objective decreases by less than this (must be > 0).
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EnsembleArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub kmeans: KMeansArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct MeanArgs {
    #[arg(long)]
    pub ensemble: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct MotifsArgs {
    #[arg(long)]
    pub ensemble: PathBuf,
    /// Consensus threshold in (0.5, 1).
    #[arg(long)]
    pub tau: f64,
    /// Dataset with ground truth, for coordinates and purity.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Motif report JSON.
    #[arg(long)]
    pub out: PathBuf,
    /// Per-point CSV; defaults to the report path with a `.csv` extension.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct StabilityArgs {
    /// Dataset CSV; otherwise a fresh dataset is drawn per trial.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub generator: GeneratorArgs,
    #[arg(long)]
    pub kmin: usize,
    #[arg(long)]
    pub kmax: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Writes `<prefix>.csv`, `<prefix>.trial-<t>.csv` and `<prefix>.json`.
    #[arg(long)]
    pub out_prefix: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub kmeans: KMeansArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteArg {
    Delta,
    Mean,
    Identities,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Delta => Suite::Delta,
            SuiteArg::Mean => Suite::Mean,
            SuiteArg::Identities => Suite::Identities,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct OracleArgs {
    #[arg(long, value_enum)]
    pub suite: SuiteArg,
    #[arg(long, default_value_t = 100)]
    pub cases: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RerunArgs {
    #[arg(long)]
    pub manifest: PathBuf,
}

/// Failure of a command, carrying its exit status.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(consensus_core::Error),
    /// The command ran but found violations it was asked to look for.
    Failed(String),
}

impl From<consensus_core::Error> for CliError {
    fn from(e: consensus_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use consensus_core::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(E::Validation(_) | E::Parse(_) | E::DimensionMismatch { .. }) => 3,
            CliError::Core(E::Capacity(_)) => 4,
            CliError::Core(E::Internal(_) | E::Io(_)) | CliError::Failed(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Failed(msg) => f.write_str(msg),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        CliError::Usage(format!("THREADS must be a positive integer, got `{raw}`"))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Core(consensus_core::Error::Internal(e.to_string())))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match configure_threads().and_then(|()| commands::run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
