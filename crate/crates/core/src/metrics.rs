//! Semi-metrics on path space.
//!
//! Every variant is reachable through [`SemiMetricSpec`], whose string form
//! (`sig:N`, `rsig:N:C:a`, `sup`, `lp:p`, `pvar:p`, `dtw`) is what the
//! command-line tools accept. Signature variants compare flattened truncated
//! signatures in the Euclidean norm of the tensor algebra; the others work on
//! the piecewise-linear paths directly, resampled onto the union of both
//! time grids when the grids differ.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::signature::{path_signature, time_augment, Path};
use crate::tensor_algebra::TruncatedTensor;

/// Parameters `(C, a)` of the tensor normalization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RobustParams {
    c: f64,
    a: f64,
}

impl RobustParams {
    pub fn new(c: f64, a: f64) -> Result<Self> {
        if !(c >= 1.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("robust threshold C must be >= 1, got {c}")));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter(format!("robust exponent a must be > 0, got {a}")));
        }
        Ok(RobustParams { c, a })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// Supremum of `Ψ`, hence of `‖Λ(t)‖²`: `C(1 + 1/a)`.
    pub fn squared_radius(&self) -> f64 {
        self.c * (1.0 + 1.0 / self.a)
    }
}

/// Which path semi-metric to use.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SemiMetricSpec {
    /// `‖Sig^{≤N}(x) − Sig^{≤N}(y)‖`.
    SigTrunc { depth: usize },
    /// `‖Λ(Sig^{≤N}(x)) − Λ(Sig^{≤N}(y))‖`.
    RSig { depth: usize, params: RobustParams },
    Sup,
    Lp { p: f64 },
    PVar { p: f64 },
    /// Dependent (joint-channel) dynamic time warping.
    Dtw,
}

impl SemiMetricSpec {
    pub fn is_signature(&self) -> bool {
        matches!(self, SemiMetricSpec::SigTrunc { .. } | SemiMetricSpec::RSig { .. })
    }

    /// The same variant with different robust parameters; other variants are unchanged.
    pub fn with_robust_params(self, params: RobustParams) -> Self {
        match self {
            SemiMetricSpec::RSig { depth, .. } => SemiMetricSpec::RSig { depth, params },
            other => other,
        }
    }

    pub fn robust_params(&self) -> Option<RobustParams> {
        match self {
            SemiMetricSpec::RSig { params, .. } => Some(*params),
            _ => None,
        }
    }

    /// Precomputes whatever the distance needs from a single path.
    pub fn embed(&self, p: &Path) -> Embedding {
        match *self {
            SemiMetricSpec::SigTrunc { depth } => Embedding::Features(path_signature(p, depth).to_flat()),
            SemiMetricSpec::RSig { depth, params } => {
                let sig = path_signature(p, depth);
                let lambda = normalize_lambda(&sig, params).expect("signatures have unit scalar part");
                Embedding::Features(sig.dilate(lambda).to_flat())
            }
            _ => Embedding::Path(p.clone()),
        }
    }

    /// Distance between two embeddings produced by [`embed`](Self::embed).
    pub fn embedded_distance(&self, x: &Embedding, y: &Embedding) -> Result<f64> {
        match (x, y) {
            (Embedding::Features(a), Embedding::Features(b)) => euclidean(a, b),
            (Embedding::Path(a), Embedding::Path(b)) => match *self {
                SemiMetricSpec::Sup => sup_distance(a, b),
                SemiMetricSpec::Lp { p } => lp_distance(a, b, p),
                SemiMetricSpec::PVar { p } => p_var_distance(a, b, p),
                SemiMetricSpec::Dtw => dtw_distance(a, b),
                _ => Err(Error::InvalidParameter("signature metric given raw paths".into())),
            },
            _ => Err(Error::InvalidParameter("embeddings of different kinds".into())),
        }
    }
}

impl fmt::Display for SemiMetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemiMetricSpec::SigTrunc { depth } => write!(f, "sig:{depth}"),
            SemiMetricSpec::RSig { depth, params } => {
                write!(f, "rsig:{}:{:?}:{:?}", depth, params.c, params.a)
            }
            SemiMetricSpec::Sup => write!(f, "sup"),
            SemiMetricSpec::Lp { p } => write!(f, "lp:{p:?}"),
            SemiMetricSpec::PVar { p } => write!(f, "pvar:{p:?}"),
            SemiMetricSpec::Dtw => write!(f, "dtw"),
        }
    }
}

impl FromStr for SemiMetricSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::MetricSpec {
            spec: s.to_string(),
            reason: reason.to_string(),
        };
        let parts: Vec<&str> = s.split(':').collect();
        let depth = |t: &str| -> Result<usize> {
            match t.parse::<usize>() {
                Ok(n) if n >= 1 => Ok(n),
                _ => Err(bad("truncation level must be a positive integer")),
            }
        };
        let real = |t: &str| -> Result<f64> {
            t.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| bad("expected a finite real parameter"))
        };
        let exponent = |t: &str| -> Result<f64> {
            let p = real(t)?;
            if p >= 1.0 {
                Ok(p)
            } else {
                Err(bad("exponent p must be >= 1"))
            }
        };
        match parts.as_slice() {
            ["sig", n] => Ok(SemiMetricSpec::SigTrunc { depth: depth(n)? }),
            ["rsig", n, c, a] => {
                let params = RobustParams::new(real(c)?, real(a)?).map_err(|e| bad(&e.to_string()))?;
                Ok(SemiMetricSpec::RSig {
                    depth: depth(n)?,
                    params,
                })
            }
            ["sup"] => Ok(SemiMetricSpec::Sup),
            ["lp", p] => Ok(SemiMetricSpec::Lp { p: exponent(p)? }),
            ["pvar", p] => Ok(SemiMetricSpec::PVar { p: exponent(p)? }),
            ["dtw"] => Ok(SemiMetricSpec::Dtw),
            _ => Err(bad("expected one of sig:N, rsig:N:C:a, sup, lp:p, pvar:p, dtw")),
        }
    }
}

/// Cached per-path data for a metric.
#[derive(Clone, Debug, PartialEq)]
pub enum Embedding {
    /// Flattened (robust) signature.
    Features(Vec<f64>),
    Path(Path),
}

/// A metric spec together with whether inputs are time-augmented first.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Metric {
    pub spec: SemiMetricSpec,
    pub augment_time: bool,
}

impl Metric {
    pub fn new(spec: SemiMetricSpec) -> Self {
        Metric {
            spec,
            augment_time: false,
        }
    }

    pub fn with_time_augmentation(mut self) -> Self {
        self.augment_time = true;
        self
    }

    pub fn embed(&self, p: &Path) -> Embedding {
        if self.augment_time {
            self.spec.embed(time_augment(p).path())
        } else {
            self.spec.embed(p)
        }
    }

    pub fn embed_all(&self, paths: &[Path]) -> Vec<Embedding> {
        paths.par_iter().map(|p| self.embed(p)).collect()
    }

    pub fn embedded_distance(&self, x: &Embedding, y: &Embedding) -> Result<f64> {
        self.spec.embedded_distance(x, y)
    }

    pub fn distance(&self, x: &Path, y: &Path) -> Result<f64> {
        self.embedded_distance(&self.embed(x), &self.embed(y))
    }

    /// Symmetric `n × n` distance matrix, row-major. Only the upper triangle
    /// is computed; the diagonal is the self-distance.
    pub fn pairwise(&self, items: &[Embedding]) -> Result<Vec<f64>> {
        let n = items.len();
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                (i..n)
                    .map(|j| self.embedded_distance(&items[i], &items[j]))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?;
        let mut out = vec![0.0; n * n];
        for (i, row) in rows.into_iter().enumerate() {
            for (offset, d) in row.into_iter().enumerate() {
                let j = i + offset;
                out[i * n + j] = d;
                out[j * n + i] = d;
            }
        }
        Ok(out)
    }

    /// `|queries| × |references|` distance matrix, row-major.
    pub fn cross(&self, queries: &[Embedding], references: &[Embedding]) -> Result<Vec<f64>> {
        let rows: Vec<Vec<f64>> = queries
            .par_iter()
            .map(|q| {
                references
                    .iter()
                    .map(|r| self.embedded_distance(q, r))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?;
        Ok(rows.into_iter().flatten().collect())
    }
}

/// Dispatches to the variant's distance, without time augmentation.
pub fn distance(spec: &SemiMetricSpec, x: &Path, y: &Path) -> Result<f64> {
    Metric::new(*spec).distance(x, y)
}

fn euclidean(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            what: "signature features",
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt())
}

fn check_dims(x: &Path, y: &Path) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            what: "path dimension",
            left: x.dim(),
            right: y.dim(),
        });
    }
    Ok(())
}

/// `‖Sig^{≤N}(x) − Sig^{≤N}(y)‖`.
pub fn trunc_sig_distance(x: &Path, y: &Path, depth: usize) -> Result<f64> {
    check_dims(x, y)?;
    euclidean(&path_signature(x, depth).to_flat(), &path_signature(y, depth).to_flat())
}

/// `Ψ_{a,C}(y)` for `y ≥ 1`, with `x = y²`: `x` up to `C`, then
/// `C + C^{1+a}(C^{−a} − x^{−a})/a`, which is continuous at `x = C` and
/// increases to `C(1 + 1/a)`.
pub fn psi(y: f64, params: RobustParams) -> Result<f64> {
    if !(y >= 1.0) {
        return Err(Error::InvalidParameter(format!("psi is defined on [1, inf), got {y}")));
    }
    Ok(psi_of_square(y * y, params))
}

fn psi_of_square(x: f64, params: RobustParams) -> f64 {
    let RobustParams { c, a } = params;
    if x <= c {
        x
    } else {
        c + c.powf(1.0 + a) * (c.powf(-a) - x.powf(-a)) / a
    }
}

/// The dilation factor `λ ≥ 0` with `Σ_k λ^{2k}‖t^{(k)}‖² = Ψ(‖t‖)`.
///
/// Returns exactly 1 when `‖t‖² ≤ C` or when every level above 0 vanishes.
/// Otherwise the left side is strictly increasing in `λ`, equals 1 at
/// `λ = 0` and `‖t‖²` at `λ = 1`, and the root is found by bisection on
/// `[0, 1]`, run until the bracket can no longer be split in `f64`. The lower
/// end of the final bracket is returned, so `‖δ_λ t‖²` never overshoots.
pub fn normalize_lambda(t: &TruncatedTensor, params: RobustParams) -> Result<f64> {
    if t.scalar() != 1.0 {
        return Err(Error::ScalarPart {
            expected: 1.0,
            found: t.scalar(),
        });
    }
    let norms = t.level_norms_sq();
    let total: f64 = norms.iter().sum();
    if norms[1..].iter().all(|&n| n == 0.0) || total <= params.c {
        return Ok(1.0);
    }
    // Ψ rounds to the radius for very large tensors; keep a little room so
    // the dilated tensor still lands inside the ball after rounding.
    let target = psi_of_square(total, params).min(params.squared_radius() * (1.0 - 1e-12));
    let f = |lambda: f64| dilated_norm_sq(&norms, lambda);

    const MAX_ITER: usize = 200;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v == target {
            return Ok(mid);
        }
        if v < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// `Σ_k λ^{2k} n_k` for squared level norms `n_k`, by Horner in `λ²`.
pub fn dilated_norm_sq(level_norms_sq: &[f64], lambda: f64) -> f64 {
    let mu = lambda * lambda;
    level_norms_sq.iter().rev().fold(0.0, |acc, &n| acc * mu + n)
}

/// `Λ(Sig^{≤N}(x))`: the signature dilated by its normalizing factor.
pub fn robust_signature(x: &Path, depth: usize, params: RobustParams) -> TruncatedTensor {
    let sig = path_signature(x, depth);
    let lambda = normalize_lambda(&sig, params).expect("signatures have unit scalar part");
    sig.dilate(lambda)
}

pub fn rsig_distance(x: &Path, y: &Path, depth: usize, params: RobustParams) -> Result<f64> {
    check_dims(x, y)?;
    euclidean(
        &robust_signature(x, depth, params).to_flat(),
        &robust_signature(y, depth, params).to_flat(),
    )
}

/// Sorted union of two time grids.
fn union_grid(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) if x < y => {
                i += 1;
                x
            }
            (Some(&x), Some(&y)) if y < x => {
                j += 1;
                y
            }
            (Some(&x), Some(_)) => {
                i += 1;
                j += 1;
                x
            }
            (Some(&x), None) => {
                i += 1;
                x
            }
            (None, Some(&y)) => {
                j += 1;
                y
            }
            (None, None) => unreachable!(),
        };
        out.push(next);
    }
    out
}

/// `x − y` sampled on the union of both grids.
pub fn difference_path(x: &Path, y: &Path) -> Result<Path> {
    check_dims(x, y)?;
    let (xs, ys) = if x.times() == y.times() {
        (x.clone(), y.clone())
    } else {
        let grid = union_grid(x.times(), y.times());
        (x.resample(&grid)?, y.resample(&grid)?)
    };
    let values = xs.values().iter().zip(ys.values()).map(|(a, b)| a - b).collect();
    Path::from_flat(xs.times().to_vec(), values, x.dim())
}

fn row_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `sup_t |x_t − y_t|`. The difference is linear between union-grid nodes,
/// so the supremum is attained at a node.
pub fn sup_distance(x: &Path, y: &Path) -> Result<f64> {
    if x.times() == y.times() {
        check_dims(x, y)?;
        let dim = x.dim();
        let mut best: f64 = 0.0;
        for (a, b) in x.values().chunks_exact(dim).zip(y.values().chunks_exact(dim)) {
            let s: f64 = a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum();
            best = best.max(s);
        }
        return Ok(best.sqrt());
    }
    let diff = difference_path(x, y)?;
    Ok(diff.points().map(row_norm).fold(0.0, f64::max))
}

/// `(∫ |x_t − y_t|^p dt)^{1/p}` by the trapezoid rule on the union grid.
pub fn lp_distance(x: &Path, y: &Path, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("L^p needs p >= 1, got {p}")));
    }
    let diff = difference_path(x, y)?;
    let heights: Vec<f64> = diff.points().map(|v| row_norm(v).powf(p)).collect();
    let integral: f64 = diff
        .times()
        .windows(2)
        .zip(heights.windows(2))
        .map(|(t, h)| 0.5 * (t[1] - t[0]) * (h[0] + h[1]))
        .sum();
    Ok(integral.powf(1.0 / p))
}

/// `‖x‖_{p-var}`: the `p`-th root of the maximum over vertex subsequences of
/// `Σ |x_{t_{j+1}} − x_{t_j}|^p`, via the `O(L²)` recursion
/// `V(j) = max_{i<j} V(i) + |x_j − x_i|^p`.
pub fn p_variation(x: &Path, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p-variation needs p >= 1, got {p}")));
    }
    let n = x.len();
    let mut best = vec![0.0f64; n];
    for j in 1..n {
        let xj = x.point(j);
        let mut v = f64::NEG_INFINITY;
        for (i, &bi) in best[..j].iter().enumerate() {
            let d: f64 = x
                .point(i)
                .iter()
                .zip(xj)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            v = v.max(bi + d.powf(p));
        }
        best[j] = v;
    }
    Ok(best[n - 1].powf(1.0 / p))
}

/// `‖x − y‖_{p-var}` on the union grid.
pub fn p_var_distance(x: &Path, y: &Path, p: f64) -> Result<f64> {
    p_variation(&difference_path(x, y)?, p)
}

/// Dependent DTW: Euclidean local cost between multivariate samples, full
/// window, unnormalized.
pub fn dtw_distance(x: &Path, y: &Path) -> Result<f64> {
    check_dims(x, y)?;
    if x.is_empty() || y.is_empty() {
        return Err(Error::Empty("DTW input path"));
    }
    let m = y.len();
    let mut prev = vec![f64::INFINITY; m + 1];
    let mut curr = vec![f64::INFINITY; m + 1];
    prev[0] = 0.0;
    for xi in x.points() {
        curr[0] = f64::INFINITY;
        for (j, yj) in y.points().enumerate() {
            let cost: f64 = xi
                .iter()
                .zip(yj)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            curr[j + 1] = cost + prev[j].min(prev[j + 1]).min(curr[j]);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    Ok(prev[m])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn scalar_path(values: &[f64]) -> Path {
        Path::from_scalars((0..values.len()).map(|i| i as f64).collect(), values.to_vec()).unwrap()
    }

    fn params(c: f64, a: f64) -> RobustParams {
        RobustParams::new(c, a).unwrap()
    }

    #[test]
    fn spec_grammar() {
        let cases = [
            ("sig:3", SemiMetricSpec::SigTrunc { depth: 3 }),
            (
                "rsig:4:4.0:1.0",
                SemiMetricSpec::RSig {
                    depth: 4,
                    params: params(4.0, 1.0),
                },
            ),
            ("sup", SemiMetricSpec::Sup),
            ("lp:2.0", SemiMetricSpec::Lp { p: 2.0 }),
            ("pvar:4.0", SemiMetricSpec::PVar { p: 4.0 }),
            ("dtw", SemiMetricSpec::Dtw),
        ];
        for (text, spec) in cases {
            assert_eq!(text.parse::<SemiMetricSpec>().unwrap(), spec);
            assert_eq!(spec.to_string(), text);
        }
        assert_eq!("lp:2".parse::<SemiMetricSpec>().unwrap(), SemiMetricSpec::Lp { p: 2.0 });
        for bad in ["", "sig", "sig:0", "sig:x", "rsig:3:0.5:1", "rsig:3:2:0", "lp:0.5", "pvar", "dtw:1", "euclid"] {
            assert!(matches!(bad.parse::<SemiMetricSpec>(), Err(Error::MetricSpec { .. })), "{bad}");
        }
    }

    #[test]
    fn trunc_sig_examples() {
        let x = scalar_path(&[0.0, 1.0]);
        let y = scalar_path(&[0.0, 2.0]);
        assert_eq!(trunc_sig_distance(&x, &x, 3).unwrap(), 0.0);
        assert!((trunc_sig_distance(&x, &y, 2).unwrap() - 3.25f64.sqrt()).abs() < 1e-15);
        let c1 = scalar_path(&[1.0, 1.0, 1.0]);
        let c2 = scalar_path(&[-4.0, -4.0]);
        assert_eq!(trunc_sig_distance(&c1, &c2, 4).unwrap(), 0.0);
        let two_d = Path::new(vec![0.0, 1.0], vec![vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(trunc_sig_distance(&x, &two_d, 2), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi(1.0, params(4.0, 1.0)).unwrap(), 1.0);
        assert_eq!(psi(2.0, params(4.0, 1.0)).unwrap(), 4.0);
        // x = 10 > C = 1: 1 + 1·(1 − 1/10)/1.
        assert!((psi(10f64.sqrt(), params(1.0, 1.0)).unwrap() - 1.9).abs() < 1e-14);
        assert!(psi(0.5, params(1.0, 1.0)).is_err());
        // Continuity at the threshold from above.
        let p = params(3.0, 0.7);
        let just_above = psi((3.0f64 + 1e-9).sqrt(), p).unwrap();
        assert!((just_above - 3.0).abs() < 1e-8);
    }

    #[test]
    fn lambda_examples() {
        let p = params(1.0, 1.0);
        let t = TruncatedTensor::from_levels(1, vec![vec![1.0], vec![3.0]]).unwrap();
        // 1 + 9λ² = Ψ(√10) = 1.9, so λ = √0.1.
        let lambda = normalize_lambda(&t, p).unwrap();
        assert!((lambda - 0.1f64.sqrt()).abs() < 1e-14);
        assert_eq!(normalize_lambda(&TruncatedTensor::unit(2, 3), p).unwrap(), 1.0);
        let small = TruncatedTensor::from_levels(2, vec![vec![1.0], vec![0.5, 0.5]]).unwrap();
        assert_eq!(normalize_lambda(&small, params(2.0, 1.0)).unwrap(), 1.0);
        assert!(matches!(
            normalize_lambda(&TruncatedTensor::zero(1, 2), p),
            Err(Error::ScalarPart { .. })
        ));
    }

    #[test]
    fn robust_signature_examples() {
        let p = params(2.0, 1.0);
        let constant = scalar_path(&[3.0, 3.0]);
        assert_eq!(robust_signature(&constant, 3, p), TruncatedTensor::unit(1, 3));
        let small = scalar_path(&[0.0, 0.3, 0.5]);
        assert_eq!(robust_signature(&small, 3, p), path_signature(&small, 3));
        let big = scalar_path(&[0.0, 5.0, -2.0, 8.0]);
        let r = robust_signature(&big, 4, p);
        assert!(r.norm().powi(2) <= p.squared_radius() + 1e-12);
    }

    #[test]
    fn sup_and_lp_examples() {
        let x = Path::from_scalars(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        let zero = Path::from_scalars(vec![0.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(sup_distance(&x, &x).unwrap(), 0.0);
        assert_eq!(sup_distance(&x, &zero).unwrap(), 1.0);
        assert_eq!(lp_distance(&x, &zero, 1.0).unwrap(), 0.5);
        let c = Path::from_scalars(vec![0.0, 0.4, 1.0], vec![-2.5; 3]).unwrap();
        assert!((sup_distance(&c, &zero).unwrap() - 2.5).abs() < 1e-15);
        for p in [1.0, 2.0, 3.5] {
            assert!((lp_distance(&c, &zero, p).unwrap() - 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn mismatched_grids_use_union() {
        let x = Path::from_scalars(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        let y = Path::from_scalars(vec![0.0, 0.5, 1.0], vec![0.0, 1.5, 1.0]).unwrap();
        // Difference on {0, .5, 1} is (0, −1, 0).
        assert_eq!(sup_distance(&x, &y).unwrap(), 1.0);
        assert!((lp_distance(&x, &y, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((p_var_distance(&x, &y, 1.0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn p_variation_examples() {
        assert!((p_variation(&scalar_path(&[0.0, 1.0, 2.0]), 2.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((p_variation(&scalar_path(&[0.0, 1.0, 0.0]), 1.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((p_variation(&scalar_path(&[0.0, 1.0, 0.0]), 2.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(p_variation(&scalar_path(&[4.0]), 2.0).unwrap(), 0.0);
        assert!(p_variation(&scalar_path(&[0.0, 1.0]), 0.5).is_err());
    }

    /// Maximum over all vertex subsets containing both endpoints.
    fn p_variation_brute_force(values: &[f64], p: f64) -> f64 {
        let n = values.len();
        let inner = n - 2;
        let mut best: f64 = 0.0;
        for mask in 0u32..(1 << inner) {
            let mut idx = vec![0];
            idx.extend((0..inner).filter(|k| mask & (1 << k) != 0).map(|k| k + 1));
            idx.push(n - 1);
            let s: f64 = idx.windows(2).map(|w| (values[w[1]] - values[w[0]]).abs().powf(p)).sum();
            best = best.max(s);
        }
        best.powf(1.0 / p)
    }

    #[test]
    fn p_variation_matches_subset_enumeration() {
        let values = [0.0, 1.3, -0.4, 0.9, 0.8, 2.5, -1.0, 0.2, 1.1];
        for p in [1.0, 1.5, 2.0, 3.0, 4.0] {
            let dp = p_variation(&scalar_path(&values), p).unwrap();
            let brute = p_variation_brute_force(&values, p);
            assert!((dp - brute).abs() < 1e-12, "p = {p}: {dp} vs {brute}");
        }
    }

    #[test]
    fn dtw_examples() {
        let a = scalar_path(&[1.0, 2.0, 3.0]);
        let b = scalar_path(&[1.0, 2.0, 2.0, 3.0]);
        assert_eq!(dtw_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(dtw_distance(&a, &b).unwrap(), 0.0);
        let zeros = scalar_path(&[0.0; 3]);
        let ones = scalar_path(&[1.0; 3]);
        assert_eq!(dtw_distance(&zeros, &ones).unwrap(), 3.0);
    }

    #[test]
    fn dtw_breaks_the_triangle_inequality() {
        let x = scalar_path(&[0.0; 3]);
        let y = scalar_path(&[0.0, 1.0]);
        let z = scalar_path(&[1.0; 3]);
        let d = |a, b| dtw_distance(a, b).unwrap();
        assert_eq!(d(&x, &y), 1.0);
        assert_eq!(d(&y, &z), 1.0);
        assert_eq!(d(&x, &z), 3.0);
    }

    /// Minimum over every monotone warping path, by exhaustive recursion.
    fn dtw_brute_force(x: &[Vec<f64>], y: &[Vec<f64>], i: usize, j: usize) -> f64 {
        let cost = x[i].iter().zip(&y[j]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        if i == 0 && j == 0 {
            return cost;
        }
        let mut best = f64::INFINITY;
        if i > 0 {
            best = best.min(dtw_brute_force(x, y, i - 1, j));
        }
        if j > 0 {
            best = best.min(dtw_brute_force(x, y, i, j - 1));
        }
        if i > 0 && j > 0 {
            best = best.min(dtw_brute_force(x, y, i - 1, j - 1));
        }
        cost + best
    }

    #[test]
    fn dtw_matches_exhaustive_alignment() {
        let xs = vec![vec![0.0, 1.0], vec![1.0, 0.5], vec![2.0, -1.0], vec![0.3, 0.3], vec![1.0, 1.0]];
        let ys = vec![vec![0.2, 0.8], vec![1.5, 0.0], vec![0.0, 0.0], vec![1.0, 1.2]];
        let px = Path::new((0..xs.len()).map(|i| i as f64).collect(), xs.clone()).unwrap();
        let py = Path::new((0..ys.len()).map(|i| i as f64).collect(), ys.clone()).unwrap();
        let brute = dtw_brute_force(&xs, &ys, xs.len() - 1, ys.len() - 1);
        assert!((dtw_distance(&px, &py).unwrap() - brute).abs() < 1e-12);
    }

    #[test]
    fn dispatch_is_transparent() {
        let x = Path::new(vec![0.0, 0.5, 1.0], vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        let y = Path::new(vec![0.0, 0.5, 1.0], vec![vec![0.2, 0.1], vec![-1.0, 0.3], vec![0.0, 2.0]]).unwrap();
        let sig2: SemiMetricSpec = "sig:2".parse().unwrap();
        assert_eq!(distance(&sig2, &x, &y).unwrap(), trunc_sig_distance(&x, &y, 2).unwrap());
        assert_eq!(distance(&SemiMetricSpec::Sup, &x, &x).unwrap(), 0.0);
        let rp = params(1.5, 0.5);
        let rsig = SemiMetricSpec::RSig { depth: 3, params: rp };
        assert!((distance(&rsig, &x, &y).unwrap() - rsig_distance(&x, &y, 3, rp).unwrap()).abs() < 1e-15);
        let aug = Metric::new(sig2).with_time_augmentation();
        let direct = trunc_sig_distance(time_augment(&x).path(), time_augment(&y).path(), 2).unwrap();
        assert_eq!(aug.distance(&x, &y).unwrap(), direct);
    }

    #[test]
    fn pairwise_matrix_is_symmetric() {
        let paths: Vec<Path> = (0..5)
            .map(|k| scalar_path(&[0.0, k as f64 * 0.3, -(k as f64) * 0.1, 1.0]))
            .collect();
        let metric = Metric::new(SemiMetricSpec::Dtw);
        let emb = metric.embed_all(&paths);
        let m = metric.pairwise(&emb).unwrap();
        for i in 0..5 {
            assert_eq!(m[i * 5 + i], 0.0);
            for j in 0..5 {
                assert_eq!(m[i * 5 + j], m[j * 5 + i]);
            }
        }
        let c = metric.cross(&emb[..2], &emb).unwrap();
        assert_eq!(&c[..5], &m[..5]);
    }

    proptest! {
        #[test]
        fn spec_round_trips(depth in 1usize..6, c in 1.0f64..10.0, a in 0.01f64..5.0, p in 1.0f64..8.0, pick in 0usize..6) {
            let spec = match pick {
                0 => SemiMetricSpec::SigTrunc { depth },
                1 => SemiMetricSpec::RSig { depth, params: RobustParams::new(c, a).unwrap() },
                2 => SemiMetricSpec::Sup,
                3 => SemiMetricSpec::Lp { p },
                4 => SemiMetricSpec::PVar { p },
                _ => SemiMetricSpec::Dtw,
            };
            prop_assert_eq!(spec.to_string().parse::<SemiMetricSpec>().unwrap(), spec);
        }

        #[test]
        fn lambda_solves_defining_equation(levels in prop::collection::vec(-4.0f64..4.0, 14), c in 1.0f64..6.0, a in 0.1f64..3.0) {
            let t = TruncatedTensor::from_levels(2, vec![vec![1.0], levels[0..2].to_vec(), levels[2..6].to_vec(), levels[6..14].to_vec()]).unwrap();
            let p = RobustParams::new(c, a).unwrap();
            let lambda = normalize_lambda(&t, p).unwrap();
            prop_assert!((0.0..=1.0).contains(&lambda));
            let lhs = dilated_norm_sq(&t.level_norms_sq(), lambda);
            let target = psi(t.norm(), p).unwrap();
            prop_assert!((lhs - target).abs() <= 1e-10 * target);
            prop_assert!(t.dilate(lambda).norm().powi(2) <= p.squared_radius() * (1.0 + 1e-12));
        }
    }
}
