//! Nadaraya–Watson regression and classification over path semi-metrics.
//!
//! For training pairs `(X_i, Y_i)`, a metric `ρ`, kernel `K` and bandwidth
//! `h`, the estimate at `x` is the weighted mean of the `Y_i` with weights
//! `K(ρ(x, X_i)/h)`. Classification replaces `Y_i` with class indicators.
//! When every weight vanishes (or the weight sum underflows below `1e-300`),
//! the estimate falls back to the nearest training input, with ties going to
//! the lowest training index.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metrics::{Embedding, Metric, RobustParams};
use crate::signature::Path;

/// Weight sums at or below this are treated as zero.
pub const DENOMINATOR_FLOOR: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelSpec {
    /// `1_{[0,1]}(u)`.
    Box,
    /// `exp(−u²/2)`.
    Gaussian,
}

impl KernelSpec {
    pub fn eval(&self, u: f64) -> Result<f64> {
        if !(u >= 0.0) {
            return Err(Error::InvalidParameter(format!("kernel argument must be >= 0, got {u}")));
        }
        Ok(self.weight(u))
    }

    fn weight(&self, u: f64) -> f64 {
        match self {
            KernelSpec::Box => {
                if u <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            KernelSpec::Gaussian => (-0.5 * u * u).exp(),
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelSpec::Box => "box",
            KernelSpec::Gaussian => "gaussian",
        })
    }
}

impl FromStr for KernelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "box" => Ok(KernelSpec::Box),
            "gaussian" => Ok(KernelSpec::Gaussian),
            other => Err(Error::InvalidParameter(format!(
                "unknown kernel `{other}` (expected box or gaussian)"
            ))),
        }
    }
}

fn nearest(distances: &[f64]) -> usize {
    let mut best = 0;
    for (i, &d) in distances.iter().enumerate() {
        if d < distances[best] {
            best = i;
        }
    }
    best
}

/// Kernel weights `K(d_i / h)`, or `None` when their sum is degenerate.
fn weights(kernel: KernelSpec, bandwidth: f64, distances: &[f64]) -> Option<Vec<f64>> {
    let w: Vec<f64> = distances.iter().map(|&d| kernel.weight(d / bandwidth)).collect();
    let total: f64 = w.iter().sum();
    if total > DENOMINATOR_FLOOR {
        Some(w)
    } else {
        None
    }
}

/// Nadaraya–Watson estimate from precomputed distances to the training inputs.
pub fn predict_from_distances(kernel: KernelSpec, bandwidth: f64, distances: &[f64], targets: &[f64]) -> f64 {
    match weights(kernel, bandwidth, distances) {
        Some(w) => {
            let num: f64 = w.iter().zip(targets).map(|(w, y)| w * y).sum();
            let den: f64 = w.iter().sum();
            num / den
        }
        None => targets[nearest(distances)],
    }
}

/// Predicted label with per-class scores `p̂_g(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub label: String,
    pub scores: BTreeMap<String, f64>,
}

/// Class scores from precomputed distances. The argmax prefers the
/// lexicographically smallest label on ties.
pub fn classify_from_distances(
    kernel: KernelSpec,
    bandwidth: f64,
    distances: &[f64],
    labels: &[String],
) -> Classification {
    let mut scores: BTreeMap<String, f64> = labels.iter().map(|l| (l.clone(), 0.0)).collect();
    match weights(kernel, bandwidth, distances) {
        Some(w) => {
            let den: f64 = w.iter().sum();
            for (wi, l) in w.iter().zip(labels) {
                *scores.get_mut(l).expect("label registered") += wi;
            }
            for v in scores.values_mut() {
                *v /= den;
            }
        }
        None => {
            let l = &labels[nearest(distances)];
            *scores.get_mut(l).expect("label registered") = 1.0;
        }
    }
    let mut label: Option<(&String, f64)> = None;
    for (l, &s) in &scores {
        if label.map_or(true, |(_, best)| s > best) {
            label = Some((l, s));
        }
    }
    Classification {
        label: label.expect("at least one class").0.clone(),
        scores,
    }
}

/// A fitted estimator: metric, kernel, bandwidth and the cached embeddings
/// of the training inputs. `Y` is `f64` for regression and `String` for
/// classification.
#[derive(Clone, Debug)]
pub struct NwModel<Y> {
    metric: Metric,
    kernel: KernelSpec,
    bandwidth: f64,
    input_dim: usize,
    embeddings: Vec<Embedding>,
    targets: Vec<Y>,
}

pub fn fit<Y: Clone>(
    metric: Metric,
    kernel: KernelSpec,
    bandwidth: f64,
    inputs: &[Path],
    targets: &[Y],
) -> Result<NwModel<Y>> {
    if inputs.is_empty() {
        return Err(Error::Empty("training set"));
    }
    if inputs.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            what: "training inputs vs targets",
            left: inputs.len(),
            right: targets.len(),
        });
    }
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(Error::InvalidParameter(format!("bandwidth must be > 0, got {bandwidth}")));
    }
    let input_dim = inputs[0].dim();
    if let Some(bad) = inputs.iter().find(|p| p.dim() != input_dim) {
        return Err(Error::DimensionMismatch {
            what: "training path dimension",
            left: bad.dim(),
            right: input_dim,
        });
    }
    Ok(NwModel {
        metric,
        kernel,
        bandwidth,
        input_dim,
        embeddings: metric.embed_all(inputs),
        targets: targets.to_vec(),
    })
}

impl<Y> NwModel<Y> {
    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn kernel(&self) -> KernelSpec {
        self.kernel
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn targets(&self) -> &[Y] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Distances from `x` to every training input.
    pub fn distances(&self, x: &Path) -> Result<Vec<f64>> {
        if x.dim() != self.input_dim {
            return Err(Error::DimensionMismatch {
                what: "query path dimension",
                left: x.dim(),
                right: self.input_dim,
            });
        }
        let q = self.metric.embed(x);
        self.embeddings
            .iter()
            .map(|e| self.metric.embedded_distance(&q, e))
            .collect()
    }
}

impl NwModel<f64> {
    pub fn predict(&self, x: &Path) -> Result<f64> {
        let d = self.distances(x)?;
        Ok(predict_from_distances(self.kernel, self.bandwidth, &d, &self.targets))
    }

    pub fn predict_batch(&self, xs: &[Path]) -> Result<Vec<f64>> {
        xs.par_iter().map(|x| self.predict(x)).collect()
    }
}

impl NwModel<String> {
    pub fn classify(&self, x: &Path) -> Result<Classification> {
        let d = self.distances(x)?;
        Ok(classify_from_distances(self.kernel, self.bandwidth, &d, &self.targets))
    }

    pub fn classify_batch(&self, xs: &[Path]) -> Result<Vec<Classification>> {
        xs.par_iter().map(|x| self.classify(x)).collect()
    }
}

pub fn rmse(predictions: &[f64], targets: &[f64]) -> Result<f64> {
    check_aligned(predictions.len(), targets.len())?;
    let mse = predictions
        .iter()
        .zip(targets)
        .map(|(p, t)| (p - t) * (p - t))
        .sum::<f64>()
        / predictions.len() as f64;
    Ok(mse.sqrt())
}

/// Fraction of predictions equal to the reference labels.
pub fn accuracy<T: PartialEq>(predictions: &[T], labels: &[T]) -> Result<f64> {
    check_aligned(predictions.len(), labels.len())?;
    let hits = predictions.iter().zip(labels).filter(|(p, l)| p == l).count();
    Ok(hits as f64 / predictions.len() as f64)
}

fn check_aligned(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            what: "predictions vs references",
            left: a,
            right: b,
        });
    }
    if a == 0 {
        return Err(Error::Empty("predictions"));
    }
    Ok(())
}

/// Bandwidth candidates for cross-validation.
#[derive(Clone, Debug, PartialEq)]
pub enum BandwidthGrid {
    Explicit(Vec<f64>),
    /// Multipliers of the median pairwise training distance.
    RelativeToMedian(Vec<f64>),
}

impl BandwidthGrid {
    /// Twelve geometrically spaced multipliers spanning `[0.05, 5]`.
    pub fn default_relative() -> Self {
        BandwidthGrid::RelativeToMedian(geometric_grid(0.05, 5.0, 12))
    }

    fn resolve(&self, median: f64) -> Vec<f64> {
        match self {
            BandwidthGrid::Explicit(v) => v.clone(),
            BandwidthGrid::RelativeToMedian(v) => v.iter().map(|m| m * median).collect(),
        }
    }

    fn validate(&self) -> Result<()> {
        let v = match self {
            BandwidthGrid::Explicit(v) | BandwidthGrid::RelativeToMedian(v) => v,
        };
        if v.is_empty() {
            return Err(Error::Empty("bandwidth grid"));
        }
        if v.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(Error::InvalidParameter("bandwidth grid entries must be positive".into()));
        }
        Ok(())
    }
}

/// `n` points from `lo` to `hi` with constant ratio.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let ratio = (hi / lo).ln() / (n - 1) as f64;
    (0..n).map(|i| lo * (ratio * i as f64).exp()).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CvConfig {
    pub folds: usize,
    pub bandwidths: BandwidthGrid,
    /// Candidate thresholds `C` for robust metrics; `None` keeps the metric's own.
    pub c_grid: Option<Vec<f64>>,
    /// Candidate exponents `a` for robust metrics; `None` keeps the metric's own.
    pub a_grid: Option<Vec<f64>>,
    pub seed: u64,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            folds: 5,
            bandwidths: BandwidthGrid::default_relative(),
            c_grid: None,
            a_grid: None,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CvCandidate {
    pub bandwidth: f64,
    pub robust: Option<RobustParams>,
    /// Mean validation score over folds (RMSE or accuracy).
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CvOutcome {
    pub best: CvCandidate,
    pub candidates: Vec<CvCandidate>,
}

impl CvOutcome {
    /// The metric with the selected robust parameters applied.
    pub fn tuned_metric(&self, metric: Metric) -> Metric {
        match self.best.robust {
            Some(p) => Metric {
                spec: metric.spec.with_robust_params(p),
                ..metric
            },
            None => metric,
        }
    }
}

/// Targets that can be scored on a validation fold.
pub trait CvTarget: Clone + Send + Sync {
    const HIGHER_IS_BETTER: bool;

    /// Validation score for one fold given `val × train` distances.
    fn fold_score(kernel: KernelSpec, bandwidth: f64, distances: &[Vec<f64>], train: &[Self], val: &[Self]) -> f64;
}

impl CvTarget for f64 {
    const HIGHER_IS_BETTER: bool = false;

    fn fold_score(kernel: KernelSpec, bandwidth: f64, distances: &[Vec<f64>], train: &[f64], val: &[f64]) -> f64 {
        let preds: Vec<f64> = distances
            .iter()
            .map(|d| predict_from_distances(kernel, bandwidth, d, train))
            .collect();
        rmse(&preds, val).unwrap_or(f64::INFINITY)
    }
}

impl CvTarget for String {
    const HIGHER_IS_BETTER: bool = true;

    fn fold_score(kernel: KernelSpec, bandwidth: f64, distances: &[Vec<f64>], train: &[String], val: &[String]) -> f64 {
        let preds: Vec<String> = distances
            .iter()
            .map(|d| classify_from_distances(kernel, bandwidth, d, train).label)
            .collect();
        accuracy(&preds, val).unwrap_or(0.0)
    }
}

/// Deterministic k-fold split: shuffle `0..n` with the seed, then cut into
/// `k` contiguous folds whose sizes differ by at most one.
pub fn kfold_indices(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 folds, got {k}")));
    }
    if k > n {
        return Err(Error::InvalidParameter(format!("{k} folds exceed {n} training samples")));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (base, extra) = (n / k, n % k);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let size = base + usize::from(f < extra);
        folds.push(idx[start..start + size].to_vec());
        start += size;
    }
    Ok(folds)
}

fn median_positive_distance(matrix: &[f64], n: usize) -> f64 {
    let mut upper: Vec<f64> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .map(|(i, j)| matrix[i * n + j])
        .filter(|&d| d > 0.0)
        .collect();
    if upper.is_empty() {
        return 1.0;
    }
    upper.sort_by(f64::total_cmp);
    let m = upper.len();
    if m % 2 == 1 {
        upper[m / 2]
    } else {
        0.5 * (upper[m / 2 - 1] + upper[m / 2])
    }
}

fn robust_candidates(cfg: &CvConfig, metric: &Metric) -> Result<Vec<Option<RobustParams>>> {
    let Some(own) = metric.spec.robust_params() else {
        return Ok(vec![None]);
    };
    let cs = cfg.c_grid.clone().unwrap_or_else(|| vec![own.c()]);
    let as_ = cfg.a_grid.clone().unwrap_or_else(|| vec![own.a()]);
    if cs.is_empty() {
        return Err(Error::Empty("robust C grid"));
    }
    if as_.is_empty() {
        return Err(Error::Empty("robust a grid"));
    }
    let mut out = Vec::with_capacity(cs.len() * as_.len());
    for &c in &cs {
        for &a in &as_ {
            out.push(Some(RobustParams::new(c, a)?));
        }
    }
    Ok(out)
}

fn candidate_key(c: &CvCandidate) -> (f64, f64, f64) {
    match c.robust {
        Some(p) => (c.bandwidth, p.c(), p.a()),
        None => (c.bandwidth, 0.0, 0.0),
    }
}

/// Grid search over bandwidths (and robust parameters for `rsig`) by k-fold
/// cross-validation. Returns every candidate with its mean validation score
/// and the best one; ties go to the smaller `h`, then smaller `C`, then
/// smaller `a`.
pub fn cross_validate<Y: CvTarget>(
    cfg: &CvConfig,
    metric: Metric,
    kernel: KernelSpec,
    inputs: &[Path],
    targets: &[Y],
) -> Result<CvOutcome> {
    if inputs.is_empty() {
        return Err(Error::Empty("training set"));
    }
    if inputs.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            what: "training inputs vs targets",
            left: inputs.len(),
            right: targets.len(),
        });
    }
    cfg.bandwidths.validate()?;
    let n = inputs.len();
    let folds = kfold_indices(n, cfg.folds, cfg.seed)?;
    let fold_sets: Vec<(Vec<usize>, &Vec<usize>)> = folds
        .iter()
        .enumerate()
        .map(|(f, val)| {
            let train: Vec<usize> = folds
                .iter()
                .enumerate()
                .filter(|(g, _)| *g != f)
                .flat_map(|(_, idx)| idx.iter().copied())
                .collect();
            (train, val)
        })
        .collect();

    let mut candidates = Vec::new();
    for robust in robust_candidates(cfg, &metric)? {
        let m = match robust {
            Some(p) => Metric {
                spec: metric.spec.with_robust_params(p),
                ..metric
            },
            None => metric,
        };
        let embeddings = m.embed_all(inputs);
        let matrix = m.pairwise(&embeddings)?;
        let grid = cfg.bandwidths.resolve(median_positive_distance(&matrix, n));

        let per_fold: Vec<(Vec<Vec<f64>>, Vec<Y>, Vec<Y>)> = fold_sets
            .iter()
            .map(|(train, val)| {
                let dists = val
                    .iter()
                    .map(|&v| train.iter().map(|&t| matrix[v * n + t]).collect())
                    .collect();
                let train_y = train.iter().map(|&t| targets[t].clone()).collect();
                let val_y = val.iter().map(|&v| targets[v].clone()).collect();
                (dists, train_y, val_y)
            })
            .collect();

        let scored: Vec<CvCandidate> = grid
            .par_iter()
            .map(|&h| {
                let total: f64 = per_fold
                    .iter()
                    .map(|(d, ty, vy)| Y::fold_score(kernel, h, d, ty, vy))
                    .sum();
                CvCandidate {
                    bandwidth: h,
                    robust,
                    score: total / per_fold.len() as f64,
                }
            })
            .collect();
        candidates.extend(scored);
    }

    let mut order: Vec<&CvCandidate> = candidates.iter().collect();
    order.sort_by(|a, b| {
        let (ka, kb) = (candidate_key(a), candidate_key(b));
        ka.0.total_cmp(&kb.0)
            .then(ka.1.total_cmp(&kb.1))
            .then(ka.2.total_cmp(&kb.2))
    });
    let better = |s: f64, best: f64| {
        if s.is_nan() {
            false
        } else if best.is_nan() {
            true
        } else if Y::HIGHER_IS_BETTER {
            s > best
        } else {
            s < best
        }
    };
    let mut best = *order[0];
    for c in &order[1..] {
        if better(c.score, best.score) {
            best = **c;
        }
    }
    Ok(CvOutcome { best, candidates })
}
