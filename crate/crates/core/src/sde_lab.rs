//! Synthetic regression data from SDEs driven by Brownian motion.
//!
//! Drivers are sampled on the uniform grid `t_i = iT/L`; the target of each
//! driver is the Itô Euler–Maruyama terminal value `Z_T` of
//! `dZ = b(Z) dt + σ(Z) dB`. Randomness is reproducible per sample: sample
//! `i` draws from ChaCha20 keyed by the run seed with stream id `i`, and
//! Gaussian increments come from `rand_distr::StandardNormal` (ziggurat).

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::format::sig6;
use crate::metrics::{Metric, SemiMetricSpec};
use crate::regression::{cross_validate, fit, rmse, CvCandidate, CvConfig, KernelSpec};
use crate::signature::{time_augment, Path};

/// A named scalar coefficient function for user-registered drifts and diffusions.
#[derive(Clone)]
pub struct NamedFn {
    name: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl NamedFn {
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        NamedFn {
            name: name.into(),
            f: Arc::new(f),
        }
    }
}

impl fmt::Debug for NamedFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NamedFn({})", self.name)
    }
}

#[derive(Clone, Debug)]
pub enum Drift {
    Zero,
    /// `b(x) = −x^p`.
    NegPower(u32),
    Custom(NamedFn),
}

impl Drift {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Drift::Zero => 0.0,
            Drift::NegPower(p) => -x.powi(*p as i32),
            Drift::Custom(g) => (g.f)(x),
        }
    }
}

impl fmt::Display for Drift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Drift::Zero => write!(f, "zero"),
            Drift::NegPower(p) => write!(f, "power:{p}"),
            Drift::Custom(g) => write!(f, "{}", g.name),
        }
    }
}

impl FromStr for Drift {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "zero" => Ok(Drift::Zero),
            Some(("power", p)) => p
                .parse()
                .map(Drift::NegPower)
                .map_err(|_| Error::InvalidParameter(format!("bad drift power `{p}`"))),
            _ => Err(Error::InvalidParameter(format!(
                "unknown drift `{s}` (expected zero or power:p)"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Diffusion {
    Zero,
    /// `σ(x) = x cos(x)`.
    XCos,
    /// `σ(x) = x`.
    Linear,
    Custom(NamedFn),
}

impl Diffusion {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Diffusion::Zero => 0.0,
            Diffusion::XCos => x * x.cos(),
            Diffusion::Linear => x,
            Diffusion::Custom(g) => (g.f)(x),
        }
    }
}

impl fmt::Display for Diffusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diffusion::Zero => write!(f, "zero"),
            Diffusion::XCos => write!(f, "xcos"),
            Diffusion::Linear => write!(f, "linear"),
            Diffusion::Custom(g) => write!(f, "{}", g.name),
        }
    }
}

impl FromStr for Diffusion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(Diffusion::Zero),
            "xcos" => Ok(Diffusion::XCos),
            "linear" => Ok(Diffusion::Linear),
            _ => Err(Error::InvalidParameter(format!(
                "unknown diffusion `{s}` (expected zero, xcos or linear)"
            ))),
        }
    }
}

/// One-dimensional SDE `dZ = b(Z) dt + σ(Z) dB`, `Z_0 = z0`, solved on `[0, T]` with `L` steps.
#[derive(Clone, Debug)]
pub struct SdeConfig {
    pub drift: Drift,
    pub diffusion: Diffusion,
    pub z0: f64,
    pub horizon: f64,
    pub steps: usize,
}

impl SdeConfig {
    /// `b(x) = −x^p`, `σ(x) = x cos x`, `Z_0 = 1`, `T = 1`, `L = 500`.
    pub fn power_xcos(p: u32) -> Self {
        SdeConfig {
            drift: Drift::NegPower(p),
            diffusion: Diffusion::XCos,
            z0: 1.0,
            horizon: 1.0,
            steps: 500,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::InvalidParameter("SDE needs at least one Euler step".into()));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidParameter(format!("horizon must be > 0, got {}", self.horizon)));
        }
        if !self.z0.is_finite() {
            return Err(Error::InvalidParameter("initial value must be finite".into()));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        uniform_grid(self.steps, self.horizon)
    }
}

fn uniform_grid(steps: usize, horizon: f64) -> Vec<f64> {
    (0..=steps).map(|i| i as f64 * horizon / steps as f64).collect()
}

/// Seed for a reproducible run; sample `i` uses its own stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RngSpec {
    pub seed: u64,
}

/// Stream ids at and above this are reserved for held-out test samples.
pub const TEST_STREAM_OFFSET: u64 = 1 << 40;

impl RngSpec {
    pub fn new(seed: u64) -> Self {
        RngSpec { seed }
    }

    pub fn stream(&self, index: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }
}

/// Brownian motion on `t_i = iT/L` in `dim` independent channels, started at 0.
pub fn sample_brownian<R: Rng + ?Sized>(steps: usize, horizon: f64, dim: usize, rng: &mut R) -> Result<Path> {
    if steps == 0 {
        return Err(Error::InvalidParameter("Brownian grid needs at least one step".into()));
    }
    if dim == 0 {
        return Err(Error::InvalidParameter("Brownian dimension must be positive".into()));
    }
    let sd = (horizon / steps as f64).sqrt();
    let mut values = Vec::with_capacity((steps + 1) * dim);
    values.extend(std::iter::repeat(0.0).take(dim));
    for i in 0..steps {
        for c in 0..dim {
            let z: f64 = rng.sample(StandardNormal);
            let prev = values[i * dim + c];
            values.push(prev + sd * z);
        }
    }
    Path::from_flat(uniform_grid(steps, horizon), values, dim)
}

/// Itô Euler–Maruyama terminal value `Z_L` for a one-dimensional driver
/// sampled on the Euler grid.
pub fn euler_maruyama(cfg: &SdeConfig, driver: &Path) -> Result<f64> {
    cfg.validate()?;
    if driver.dim() != 1 {
        return Err(Error::GridMismatch(format!(
            "driver must be one-dimensional, got dimension {}",
            driver.dim()
        )));
    }
    if driver.segments() != cfg.steps {
        return Err(Error::GridMismatch(format!(
            "driver has {} steps, config has {}",
            driver.segments(),
            cfg.steps
        )));
    }
    let tol = 1e-9 * cfg.horizon;
    if let Some((i, t)) = driver
        .times()
        .iter()
        .zip(cfg.grid())
        .enumerate()
        .find_map(|(i, (a, b))| ((a - b).abs() > tol).then_some((i, *a)))
    {
        return Err(Error::GridMismatch(format!("t[{i}] = {t} is off the uniform grid")));
    }
    let dt = cfg.dt();
    let b = driver.values();
    let mut z = cfg.z0;
    for i in 0..cfg.steps {
        let db = b[i + 1] - b[i];
        z += cfg.drift.eval(z) * dt + cfg.diffusion.eval(z) * db;
        if !z.is_finite() {
            return Err(Error::NonFinite { step: i + 1, value: z });
        }
    }
    Ok(z)
}

/// Drivers and targets with a disjoint train/test split.
#[derive(Clone, Debug, PartialEq)]
pub struct RegressionDataset {
    pub inputs: Vec<Path>,
    pub targets: Vec<f64>,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

impl RegressionDataset {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn train_inputs(&self) -> Vec<Path> {
        self.train.iter().map(|&i| self.inputs[i].clone()).collect()
    }

    pub fn train_targets(&self) -> Vec<f64> {
        self.train.iter().map(|&i| self.targets[i]).collect()
    }

    pub fn test_inputs(&self) -> Vec<Path> {
        self.test.iter().map(|&i| self.inputs[i].clone()).collect()
    }

    pub fn test_targets(&self) -> Vec<f64> {
        self.test.iter().map(|&i| self.targets[i]).collect()
    }
}

/// Simulates the drivers for the given stream ids and their SDE targets.
pub fn simulate(
    cfg: &SdeConfig,
    rng: RngSpec,
    streams: impl IntoParallelIterator<Item = u64>,
    augment: bool,
) -> Result<(Vec<Path>, Vec<f64>)> {
    cfg.validate()?;
    let pairs: Vec<(Path, f64)> = streams
        .into_par_iter()
        .map(|s| {
            let driver = sample_brownian(cfg.steps, cfg.horizon, 1, &mut rng.stream(s))?;
            let target = euler_maruyama(cfg, &driver)?;
            let input = if augment {
                time_augment(&driver).into_path()
            } else {
                driver
            };
            Ok((input, target))
        })
        .collect::<Result<_>>()?;
    Ok(pairs.into_iter().unzip())
}

/// `m` samples split into the first `round(fraction·m)` for training and the
/// rest for testing.
pub fn generate_dataset(
    m: usize,
    train_fraction: f64,
    cfg: &SdeConfig,
    rng: RngSpec,
    augment: bool,
) -> Result<RegressionDataset> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 samples, got {m}")));
    }
    let n_train = (train_fraction * m as f64).round();
    if !(n_train >= 1.0 && n_train < m as f64) {
        return Err(Error::InvalidParameter(format!(
            "split fraction {train_fraction} leaves an empty side for {m} samples"
        )));
    }
    let n_train = n_train as usize;
    let (inputs, targets) = simulate(cfg, rng, 0..m as u64, augment)?;
    Ok(RegressionDataset {
        inputs,
        targets,
        train: (0..n_train).collect(),
        test: (n_train..m).collect(),
    })
}

/// `(h, #{i : ρ(X_i, x) ≤ h} / n)` for each `h` in the grid.
pub fn empirical_small_ball(samples: &[Path], x: &Path, metric: Metric, h_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if samples.is_empty() {
        return Err(Error::Empty("small-ball samples"));
    }
    if h_grid.is_empty() {
        return Err(Error::Empty("small-ball radius grid"));
    }
    let centre = metric.embed(x);
    let dists: Vec<f64> = metric
        .embed_all(samples)
        .iter()
        .map(|e| metric.embedded_distance(&centre, e))
        .collect::<Result<_>>()?;
    let n = dists.len() as f64;
    Ok(h_grid
        .iter()
        .map(|&h| (h, dists.iter().filter(|&&d| d <= h).count() as f64 / n))
        .collect())
}

/// RMSE-vs-training-size study.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    /// Training sizes, ascending.
    pub m_values: Vec<usize>,
    pub metrics: Vec<SemiMetricSpec>,
    pub sde: SdeConfig,
    pub cv: CvConfig,
    pub kernel: KernelSpec,
    /// Size of the held-out test set shared by every row.
    pub test_size: usize,
    pub seed: u64,
    /// Time-augment the Brownian drivers before any metric sees them.
    pub augment_time: bool,
}

impl ExperimentConfig {
    /// Defaults for the `−x^p`, `x cos x` experiment.
    pub fn power_xcos(p: u32) -> Self {
        ExperimentConfig {
            m_values: vec![8, 16, 32, 64, 128, 256, 512, 1024, 2048],
            metrics: vec![
                "rsig:3:1.0:1.0".parse().expect("valid spec"),
                "sig:3".parse().expect("valid spec"),
                SemiMetricSpec::Sup,
            ],
            sde: SdeConfig::power_xcos(p),
            cv: default_experiment_cv(),
            kernel: KernelSpec::Gaussian,
            test_size: 512,
            seed: 0,
            augment_time: true,
        }
    }
}

/// Five folds, twelve bandwidths relative to the median distance and a
/// small grid of normalization parameters.
pub fn default_experiment_cv() -> CvConfig {
    CvConfig {
        c_grid: Some(vec![1.0, 2.0, 4.0, 8.0]),
        a_grid: Some(vec![0.5, 1.0, 2.0]),
        ..CvConfig::default()
    }
}

/// Test RMSE and wall-clock seconds per (training size, metric).
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTable {
    pub m_values: Vec<usize>,
    pub metrics: Vec<SemiMetricSpec>,
    /// `rmse[row][col]` for `m_values[row]` and `metrics[col]`.
    pub rmse: Vec<Vec<f64>>,
    pub seconds: Vec<Vec<f64>>,
    pub selected: Vec<Vec<CvCandidate>>,
}

impl ConvergenceTable {
    pub fn column(&self, metric: &SemiMetricSpec) -> Option<Vec<f64>> {
        let col = self.metrics.iter().position(|m| m == metric)?;
        Some(self.rmse.iter().map(|row| row[col]).collect())
    }

    pub fn rmse_csv(&self) -> String {
        self.csv(&self.rmse)
    }

    pub fn timing_csv(&self) -> String {
        self.csv(&self.seconds)
    }

    fn csv(&self, cells: &[Vec<f64>]) -> String {
        let mut out = String::from("M");
        for m in &self.metrics {
            out.push(',');
            out.push_str(&m.to_string());
        }
        out.push('\n');
        for (m, row) in self.m_values.iter().zip(cells) {
            out.push_str(&m.to_string());
            for v in row {
                out.push(',');
                out.push_str(&sig6(*v));
            }
            out.push('\n');
        }
        out
    }

    /// Cellwise mean of tables sharing rows and columns.
    pub fn average(tables: &[ConvergenceTable]) -> Result<ConvergenceTable> {
        let first = tables.first().ok_or(Error::Empty("tables to average"))?;
        if tables
            .iter()
            .any(|t| t.m_values != first.m_values || t.metrics != first.metrics)
        {
            return Err(Error::InvalidParameter("tables have different shapes".into()));
        }
        let n = tables.len() as f64;
        let mean = |pick: fn(&ConvergenceTable) -> &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            (0..first.m_values.len())
                .map(|r| {
                    (0..first.metrics.len())
                        .map(|c| tables.iter().map(|t| pick(t)[r][c]).sum::<f64>() / n)
                        .collect()
                })
                .collect()
        };
        Ok(ConvergenceTable {
            m_values: first.m_values.clone(),
            metrics: first.metrics.clone(),
            rmse: mean(|t| &t.rmse),
            seconds: mean(|t| &t.seconds),
            selected: first.selected.clone(),
        })
    }
}

/// For each training size `M` and metric: cross-validate on the first `M`
/// training drivers, refit with the selected hyperparameters and report the
/// RMSE on a fixed held-out set of `test_size` drivers.
pub fn convergence_experiment(cfg: &ExperimentConfig) -> Result<ConvergenceTable> {
    if cfg.m_values.is_empty() {
        return Err(Error::Empty("training sizes"));
    }
    if cfg.metrics.is_empty() {
        return Err(Error::Empty("metrics"));
    }
    if cfg.m_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("training sizes must be strictly ascending".into()));
    }
    if cfg.test_size == 0 {
        return Err(Error::InvalidParameter("test set must be non-empty".into()));
    }
    let rng = RngSpec::new(cfg.seed);
    let max_m = *cfg.m_values.last().expect("non-empty") as u64;
    let (pool_x, pool_y) = simulate(&cfg.sde, rng, 0..max_m, cfg.augment_time)?;
    let test_streams = TEST_STREAM_OFFSET..TEST_STREAM_OFFSET + cfg.test_size as u64;
    let (test_x, test_y) = simulate(&cfg.sde, rng, test_streams, cfg.augment_time)?;

    let mut rmse_rows = Vec::with_capacity(cfg.m_values.len());
    let mut time_rows = Vec::with_capacity(cfg.m_values.len());
    let mut selected_rows = Vec::with_capacity(cfg.m_values.len());
    for &m in &cfg.m_values {
        let (train_x, train_y) = (&pool_x[..m], &pool_y[..m]);
        let mut rmse_row = Vec::with_capacity(cfg.metrics.len());
        let mut time_row = Vec::with_capacity(cfg.metrics.len());
        let mut selected_row = Vec::with_capacity(cfg.metrics.len());
        for spec in &cfg.metrics {
            let start = Instant::now();
            let metric = Metric::new(*spec);
            let cv = cross_validate(&cfg.cv, metric, cfg.kernel, train_x, train_y)?;
            let model = fit(cv.tuned_metric(metric), cfg.kernel, cv.best.bandwidth, train_x, train_y)?;
            let preds = model.predict_batch(&test_x)?;
            rmse_row.push(rmse(&preds, &test_y)?);
            time_row.push(start.elapsed().as_secs_f64());
            selected_row.push(cv.best);
        }
        rmse_rows.push(rmse_row);
        time_rows.push(time_row);
        selected_rows.push(selected_row);
    }
    Ok(ConvergenceTable {
        m_values: cfg.m_values.clone(),
        metrics: cfg.metrics.clone(),
        rmse: rmse_rows,
        seconds: time_rows,
        selected: selected_rows,
    })
}
