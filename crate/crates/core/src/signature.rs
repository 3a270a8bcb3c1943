//! Sampled paths and their truncated signatures.
//!
//! A [`Path`] is a sampled multivariate series read as the piecewise-linear
//! interpolant of its samples. The signature of a linear segment with
//! increment `δ` is `exp(δ)`, so the signature of the whole path is the
//! left-to-right tensor product of segment exponentials (Chen's identity).

use crate::error::{Error, Result};
use crate::tensor_algebra::TruncatedTensor;

/// A sampled path `t_0 < … < t_L` with `d`-dimensional values, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    times: Vec<f64>,
    values: Vec<f64>,
    dim: usize,
}

impl Path {
    /// Builds a path from times and per-sample rows.
    pub fn new(times: Vec<f64>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidPath("rows have differing lengths".into()));
        }
        let values = rows.into_iter().flatten().collect();
        Self::from_flat(times, values, dim)
    }

    /// Builds a path from times and a flat row-major value buffer.
    pub fn from_flat(times: Vec<f64>, values: Vec<f64>, dim: usize) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::InvalidPath("a path needs at least one sample".into()));
        }
        if dim == 0 {
            return Err(Error::InvalidPath("path dimension must be positive".into()));
        }
        if values.len() != times.len() * dim {
            return Err(Error::InvalidPath(format!(
                "{} values do not fill {} samples of dimension {}",
                values.len(),
                times.len(),
                dim
            )));
        }
        if times.iter().chain(&values).any(|x| !x.is_finite()) {
            return Err(Error::InvalidPath("non-finite time or value".into()));
        }
        if let Some(i) = times.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPath(format!(
                "times must be strictly increasing (t[{}] = {} >= t[{}] = {})",
                i,
                times[i],
                i + 1,
                times[i + 1]
            )));
        }
        Ok(Path { times, values, dim })
    }

    /// A one-dimensional path.
    pub fn from_scalars(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::from_flat(times, values, 1)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of samples, `L + 1`.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Number of linear segments, `L`.
    pub fn segments(&self) -> usize {
        self.times.len() - 1
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.dim)
    }

    /// Increment `x_{t_{i+1}} − x_{t_i}` of segment `i`.
    pub fn increment(&self, i: usize) -> Vec<f64> {
        self.point(i + 1)
            .iter()
            .zip(self.point(i))
            .map(|(b, a)| b - a)
            .collect()
    }

    /// Values at time `t` of the piecewise-linear interpolant; constant
    /// extrapolation outside `[t_0, t_L]`.
    pub fn value_at(&self, t: f64) -> Vec<f64> {
        let n = self.times.len();
        if t <= self.times[0] {
            return self.point(0).to_vec();
        }
        if t >= self.times[n - 1] {
            return self.point(n - 1).to_vec();
        }
        let i = self.times.partition_point(|&s| s <= t) - 1;
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let w = (t - t0) / (t1 - t0);
        self.point(i)
            .iter()
            .zip(self.point(i + 1))
            .map(|(a, b)| a + w * (b - a))
            .collect()
    }

    /// The interpolant sampled on another grid.
    pub fn resample(&self, grid: &[f64]) -> Result<Path> {
        if grid == self.times.as_slice() {
            return Ok(self.clone());
        }
        let values = grid.iter().flat_map(|&t| self.value_at(t)).collect();
        Path::from_flat(grid.to_vec(), values, self.dim)
    }

    /// Adds a constant vector to every sample.
    pub fn translate(&self, shift: &[f64]) -> Result<Path> {
        if shift.len() != self.dim {
            return Err(Error::DimensionMismatch {
                what: "translation",
                left: shift.len(),
                right: self.dim,
            });
        }
        let values = self
            .values
            .chunks_exact(self.dim)
            .flat_map(|p| p.iter().zip(shift).map(|(a, b)| a + b))
            .collect();
        Path::from_flat(self.times.clone(), values, self.dim)
    }

    /// The same trajectory traversed backwards over `[t_0, t_L]`.
    pub fn reversed(&self) -> Path {
        let (t0, tn) = (self.times[0], self.times[self.times.len() - 1]);
        let times = self.times.iter().rev().map(|t| t0 + tn - t).collect();
        let values = self.values.chunks_exact(self.dim).rev().flatten().copied().collect();
        Path {
            times,
            values,
            dim: self.dim,
        }
    }

    /// Samples `start..=end` as a path of their own.
    pub fn slice(&self, start: usize, end: usize) -> Result<Path> {
        if start > end || end >= self.len() {
            return Err(Error::InvalidParameter(format!(
                "slice {start}..={end} out of range for {} samples",
                self.len()
            )));
        }
        Path::from_flat(
            self.times[start..=end].to_vec(),
            self.values[start * self.dim..(end + 1) * self.dim].to_vec(),
            self.dim,
        )
    }

    /// Total length `Σ |x_{t_{i+1}} − x_{t_i}|` (the 1-variation of the interpolant).
    pub fn one_variation(&self) -> f64 {
        (0..self.segments())
            .map(|i| self.increment(i).iter().map(|x| x * x).sum::<f64>().sqrt())
            .sum()
    }
}

/// Path with time prepended as channel 0.
#[derive(Clone, Debug, PartialEq)]
pub struct AugmentedPath(Path);

impl AugmentedPath {
    pub fn path(&self) -> &Path {
        &self.0
    }

    pub fn into_path(self) -> Path {
        self.0
    }
}

impl AsRef<Path> for AugmentedPath {
    fn as_ref(&self) -> &Path {
        &self.0
    }
}

/// `x_t ↦ (t, x_t)`.
pub fn time_augment(p: &Path) -> AugmentedPath {
    let dim = p.dim + 1;
    let mut values = Vec::with_capacity(p.len() * dim);
    for (t, x) in p.times.iter().zip(p.points()) {
        values.push(*t);
        values.extend_from_slice(x);
    }
    AugmentedPath(Path {
        times: p.times.clone(),
        values,
        dim,
    })
}

/// Signature of a single linear segment, `exp(δ)`.
pub fn segment_signature(delta: &[f64], depth: usize) -> TruncatedTensor {
    let dim = delta.len();
    let mut levels = Vec::with_capacity(depth + 1);
    levels.push(vec![1.0]);
    for k in 1..=depth {
        let prev: &Vec<f64> = &levels[k - 1];
        let inv_k = 1.0 / k as f64;
        let next: Vec<f64> = prev
            .iter()
            .flat_map(|&a| delta.iter().map(move |&x| a * x * inv_k))
            .collect();
        levels.push(next);
    }
    TruncatedTensor::from_levels(dim, levels).expect("levels have d^k entries by construction")
}

/// Truncated signature of the piecewise-linear interpolant of `p`.
pub fn path_signature(p: &Path, depth: usize) -> TruncatedTensor {
    let mut sig = TruncatedTensor::unit(p.dim(), depth);
    let mut delta = vec![0.0; p.dim()];
    for i in 0..p.segments() {
        for (d, (b, a)) in delta.iter_mut().zip(p.point(i + 1).iter().zip(p.point(i))) {
            *d = b - a;
        }
        if delta.iter().all(|&x| x == 0.0) {
            continue;
        }
        sig.mul_segment_exp(&delta)
            .expect("increment has the path dimension");
    }
    sig
}

/// Signature of a concatenation, given the signatures of the pieces.
pub fn chen_concat(first: &TruncatedTensor, second: &TruncatedTensor) -> Result<TruncatedTensor> {
    first.tensor_product(second)
}
