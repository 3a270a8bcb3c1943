//! The `sigreg` command-line tool.
//!
//! Argument definitions live here so the binary stays a thin wrapper and the
//! commands can be driven from tests.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use sigreg::{KernelSpec, SemiMetricSpec};

pub mod commands;
pub mod error;
pub mod manifest;
pub mod records;

pub use commands::run;
pub use error::CliError;
pub use records::SeriesRecord;

#[derive(Debug, Parser)]
#[command(name = "sigreg", version, about = "Path signatures, signature metrics and kernel regression on paths")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Truncated signature of every record in a JSON-lines file.
    Sig(SigArgs),
    /// Distance matrix between the records of one or two files.
    Dist(DistArgs),
    /// RMSE against training size on the `-x^p`, `x cos x` SDE.
    SdeBench(SdeBenchArgs),
    /// Nadaraya-Watson classification with cross-validated hyperparameters.
    Classify(ClassifyArgs),
    /// Empirical small-ball probabilities of Brownian paths.
    Smallball(SmallballArgs),
    /// Dimension of the free Lie algebra truncated at level N.
    Nu(NuArgs),
}

#[derive(Debug, Args)]
pub struct SigArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub level: usize,
    #[arg(long)]
    pub augment_time: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    #[arg(long)]
    pub metric: SemiMetricSpec,
    #[arg(long)]
    pub input: PathBuf,
    /// Second file; rows are `input`, columns are `other`. Defaults to `input`.
    #[arg(long)]
    pub other: Option<PathBuf>,
    #[arg(long)]
    pub augment_time: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SdeBenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64,128,256,512,1024,2048")]
    pub m_values: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "rsig:3:1.0:1.0,sig:3,sup")]
    pub metrics: Vec<SemiMetricSpec>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Independent runs with seeds `seed, seed+1, ...`; the CSVs hold the mean.
    #[arg(long, default_value_t = 1)]
    pub replicates: u64,
    /// Drift exponent in `b(x) = -x^p`.
    #[arg(long, default_value_t = 5)]
    pub p: u32,
    #[arg(long, default_value_t = 500)]
    pub steps: usize,
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 1.0)]
    pub z0: f64,
    #[arg(long, default_value_t = 512)]
    pub test_size: usize,
    #[command(flatten)]
    pub cv: CvArgs,
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
    pub grid_c: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
    pub grid_a: Vec<f64>,
    /// Feed the raw Brownian drivers to the metrics instead of `(t, B_t)`.
    #[arg(long)]
    pub no_augment_time: bool,
    /// RMSE table; the timing table and run manifest are written next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    #[arg(long)]
    pub metric: SemiMetricSpec,
    #[command(flatten)]
    pub cv: CvArgs,
    /// Robust thresholds to search; defaults to the metric's own.
    #[arg(long, value_delimiter = ',')]
    pub grid_c: Option<Vec<f64>>,
    /// Robust exponents to search; defaults to the metric's own.
    #[arg(long, value_delimiter = ',')]
    pub grid_a: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub augment_time: bool,
    /// JSON report; printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CvArgs {
    #[arg(long, default_value_t = 5)]
    pub cv_folds: usize,
    /// Absolute bandwidths; the default is twelve multipliers in [0.05, 5]
    /// of the median pairwise training distance.
    #[arg(long, value_delimiter = ',')]
    pub grid_h: Option<Vec<f64>>,
    #[arg(long, default_value = "gaussian")]
    pub kernel: KernelSpec,
}

#[derive(Debug, Args)]
pub struct SmallballArgs {
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long)]
    pub metric: SemiMetricSpec,
    /// `lo:hi:steps`, equally spaced and inclusive.
    #[arg(long)]
    pub h_grid: RadiusGrid,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[arg(long)]
    pub augment_time: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NuArgs {
    #[arg(long)]
    pub d: u64,
    #[arg(long)]
    pub n: u64,
}

/// Radii `lo, ..., hi` in `steps` equal increments.
#[derive(Clone, Debug, PartialEq)]
pub struct RadiusGrid(pub Vec<f64>);

impl FromStr for RadiusGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, steps] = parts[..] else {
            return Err(format!("expected lo:hi:steps, got {s:?}"));
        };
        let lo: f64 = lo.parse().map_err(|_| format!("bad lower radius {lo:?}"))?;
        let hi: f64 = hi.parse().map_err(|_| format!("bad upper radius {hi:?}"))?;
        let steps: usize = steps.parse().map_err(|_| format!("bad step count {steps:?}"))?;
        if !(lo >= 0.0 && hi >= lo && hi.is_finite()) {
            return Err(format!("need 0 <= lo <= hi, got {lo}:{hi}"));
        }
        if steps == 0 {
            return Err("step count must be positive".into());
        }
        if steps == 1 {
            return Ok(RadiusGrid(vec![lo]));
        }
        let width = (hi - lo) / (steps - 1) as f64;
        Ok(RadiusGrid((0..steps).map(|i| lo + width * i as f64).collect()))
    }
}
