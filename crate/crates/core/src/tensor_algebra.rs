//! Dense arithmetic in the truncated tensor algebra `T^{≤N}(R^d)`.
//!
//! An element is stored level by level. Level `k` is a flat row-major array
//! of `d^k` coefficients, where the word `i_1 … i_k` (letters in `1..=d`)
//! lives at index `Σ_j (i_j − 1)·d^{k−j}`. Products of words are
//! concatenations, so the index of `uv` is `index(u)·d^{|v|} + index(v)`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Truncated tensor series over `R^d` with levels `0..=depth`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedTensor {
    dim: usize,
    depth: usize,
    levels: Vec<Vec<f64>>,
}

impl TruncatedTensor {
    /// The zero element.
    pub fn zero(dim: usize, depth: usize) -> Self {
        assert!(dim >= 1, "alphabet size must be positive");
        let levels = (0..=depth).map(|k| vec![0.0; dim.pow(k as u32)]).collect();
        TruncatedTensor { dim, depth, levels }
    }

    /// The unit `1 = (1, 0, 0, …)`.
    pub fn unit(dim: usize, depth: usize) -> Self {
        let mut t = Self::zero(dim, depth);
        t.levels[0][0] = 1.0;
        t
    }

    /// Builds a tensor from explicit levels; level `k` must hold `dim^k` entries.
    pub fn from_levels(dim: usize, levels: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("alphabet size must be positive".into()));
        }
        if levels.is_empty() {
            return Err(Error::Empty("tensor levels"));
        }
        for (k, level) in levels.iter().enumerate() {
            let expected = dim.pow(k as u32);
            if level.len() != expected {
                return Err(Error::DimensionMismatch {
                    what: "tensor level length",
                    left: level.len(),
                    right: expected,
                });
            }
        }
        Ok(TruncatedTensor {
            dim,
            depth: levels.len() - 1,
            levels,
        })
    }

    /// Builds a tensor whose only nonzero level is level 1, set to `v`.
    pub fn from_vector(v: &[f64], depth: usize) -> Self {
        let mut t = Self::zero(v.len(), depth);
        if depth >= 1 {
            t.levels[1].copy_from_slice(v);
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn level(&self, k: usize) -> &[f64] {
        &self.levels[k]
    }

    pub fn level_mut(&mut self, k: usize) -> &mut [f64] {
        &mut self.levels[k]
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    /// The level-0 coefficient.
    pub fn scalar(&self) -> f64 {
        self.levels[0][0]
    }

    /// Total number of coefficients, `Σ_{k≤N} d^k`.
    pub fn len(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All coefficients, level-major.
    pub fn to_flat(&self) -> Vec<f64> {
        self.levels.iter().flatten().copied().collect()
    }

    fn check_compatible(&self, other: &Self, what: &'static str) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                what,
                left: self.dim,
                right: other.dim,
            });
        }
        if self.depth != other.depth {
            return Err(Error::DimensionMismatch {
                what,
                left: self.depth,
                right: other.depth,
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, what: &'static str, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_compatible(other, what)?;
        let levels = self
            .levels
            .iter()
            .zip(&other.levels)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect())
            .collect();
        Ok(TruncatedTensor {
            dim: self.dim,
            depth: self.depth,
            levels,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "tensor addition", |x, y| x + y)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "tensor subtraction", |x, y| x - y)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map_levels(|_| c)
    }

    /// Multiplies level `k` by `lambda^k`.
    pub fn dilate(&self, lambda: f64) -> Self {
        self.map_levels(|k| lambda.powi(k as i32))
    }

    fn map_levels(&self, factor: impl Fn(usize) -> f64) -> Self {
        let levels = self
            .levels
            .iter()
            .enumerate()
            .map(|(k, level)| {
                let c = factor(k);
                level.iter().map(|x| x * c).collect()
            })
            .collect();
        TruncatedTensor {
            dim: self.dim,
            depth: self.depth,
            levels,
        }
    }

    /// Truncated tensor product; level `n` is `Σ_l a^{(l)} ⊗ b^{(n−l)}`.
    pub fn tensor_product(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other, "tensor product")?;
        let mut out = Self::zero(self.dim, self.depth);
        for n in 0..=self.depth {
            let target = &mut out.levels[n];
            for l in 0..=n {
                let left = &self.levels[l];
                let right = &other.levels[n - l];
                let stride = right.len();
                for (i, &a) in left.iter().enumerate() {
                    if a == 0.0 {
                        continue;
                    }
                    let block = &mut target[i * stride..(i + 1) * stride];
                    for (t, &b) in block.iter_mut().zip(right) {
                        *t += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Replaces `self` by `self ⊗ exp(delta)` where `delta` is a level-1
    /// element, i.e. appends a linear segment with increment `delta`.
    ///
    /// Uses the Horner form `h_j = a_j + h_{j−1} ⊗ δ / (n − j + 1)` for each
    /// output level `n`, working from the top level down so that lower
    /// levels are still unmodified when read.
    pub fn mul_segment_exp(&mut self, delta: &[f64]) -> Result<()> {
        if delta.len() != self.dim {
            return Err(Error::DimensionMismatch {
                what: "segment increment",
                left: delta.len(),
                right: self.dim,
            });
        }
        let mut acc: Vec<f64> = Vec::new();
        let mut next: Vec<f64> = Vec::new();
        for n in (1..=self.depth).rev() {
            acc.clear();
            acc.extend_from_slice(&self.levels[0]);
            for j in 1..=n {
                let factor = 1.0 / (n - j + 1) as f64;
                next.clear();
                next.reserve(acc.len() * self.dim);
                for &a in &acc {
                    let a = a * factor;
                    next.extend(delta.iter().map(|&x| a * x));
                }
                for (h, &old) in next.iter_mut().zip(&self.levels[j]) {
                    *h += old;
                }
                std::mem::swap(&mut acc, &mut next);
            }
            self.levels[n].copy_from_slice(&acc);
        }
        Ok(())
    }

    /// `⟨a, b⟩ = Σ_k ⟨a^{(k)}, b^{(k)}⟩`.
    pub fn inner_product(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other, "inner product")?;
        Ok(self
            .levels
            .iter()
            .zip(&other.levels)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>())
            .sum())
    }

    /// Squared Euclidean norm of each level.
    pub fn level_norms_sq(&self) -> Vec<f64> {
        self.levels
            .iter()
            .map(|l| l.iter().map(|x| x * x).sum())
            .collect()
    }

    pub fn norm(&self) -> f64 {
        self.level_norms_sq().iter().sum::<f64>().sqrt()
    }

    /// Truncated exponential `Σ_{n≤N} v^{⊗n}/n!`; requires a zero scalar part.
    pub fn exp(&self) -> Result<Self> {
        if self.scalar() != 0.0 {
            return Err(Error::ScalarPart {
                expected: 0.0,
                found: self.scalar(),
            });
        }
        let mut sum = Self::unit(self.dim, self.depth);
        let mut term = Self::unit(self.dim, self.depth);
        for n in 1..=self.depth {
            term = term.tensor_product(self)?.scale(1.0 / n as f64);
            sum = sum.add(&term)?;
        }
        Ok(sum)
    }

    /// Truncated logarithm `Σ_{n=1..N} (−1)^{n+1}(g − 1)^{⊗n}/n`; requires a
    /// unit scalar part. The series is exact since `g − 1` is nilpotent.
    pub fn log(&self) -> Result<Self> {
        if self.scalar() != 1.0 {
            return Err(Error::ScalarPart {
                expected: 1.0,
                found: self.scalar(),
            });
        }
        let mut x = self.clone();
        x.levels[0][0] = 0.0;
        let mut sum = Self::zero(self.dim, self.depth);
        let mut power = Self::unit(self.dim, self.depth);
        for n in 1..=self.depth {
            power = power.tensor_product(&x)?;
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            sum = sum.add(&power.scale(sign / n as f64))?;
        }
        Ok(sum)
    }

    /// The coefficient `⟨w, a⟩ = a^w`.
    pub fn coefficient(&self, w: &Word) -> Result<f64> {
        if w.len() > self.depth {
            return Err(Error::WordTooLong {
                len: w.len(),
                depth: self.depth,
            });
        }
        Ok(self.levels[w.len()][w.flat_index(self.dim)?])
    }

    /// Linear extension of [`coefficient`](Self::coefficient) to formal sums.
    pub fn pair(&self, s: &FormalWordSum) -> Result<f64> {
        s.iter()
            .map(|(w, c)| self.coefficient(w).map(|v| c * v))
            .sum()
    }
}

/// A word over the alphabet `1..=d`; the empty word is allowed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<usize>);

impl Word {
    /// Rejects the letter 0; the upper bound is checked against a tensor's
    /// alphabet when the word is used.
    pub fn new(letters: Vec<usize>) -> Result<Self> {
        if letters.contains(&0) {
            return Err(Error::LetterOutOfRange { letter: 0, dim: 0 });
        }
        Ok(Word(letters))
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Row-major index of this word within level `len()` of a tensor over `dim` letters.
    pub fn flat_index(&self, dim: usize) -> Result<usize> {
        self.0.iter().try_fold(0usize, |idx, &letter| {
            if letter == 0 || letter > dim {
                Err(Error::LetterOutOfRange { letter, dim })
            } else {
                Ok(idx * dim + (letter - 1))
            }
        })
    }

    fn split_last(&self) -> Option<(Word, usize)> {
        self.0
            .split_last()
            .map(|(&last, init)| (Word(init.to_vec()), last))
    }

    fn push(mut self, letter: usize) -> Word {
        self.0.push(letter);
        self
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "∅");
        }
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join("·"))
    }
}

/// Finite formal linear combination of words. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct FormalWordSum {
    terms: BTreeMap<Word, f64>,
}

impl FormalWordSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_word(w: Word) -> Self {
        let mut s = Self::new();
        s.add_term(w, 1.0);
        s
    }

    pub fn add_term(&mut self, w: Word, c: f64) {
        match self.terms.entry(w) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if *e.get() == 0.0 {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                if c != 0.0 {
                    e.insert(c);
                }
            }
        }
    }

    pub fn get(&self, w: &Word) -> f64 {
        self.terms.get(w).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, f64)> {
        self.terms.iter().map(|(w, &c)| (w, c))
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in other.iter() {
            out.add_term(w.clone(), c);
        }
        out
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = Self::new();
        for (w, v) in self.iter() {
            out.add_term(w.clone(), v * c);
        }
        out
    }

    fn append_letter(&self, letter: usize) -> Self {
        FormalWordSum {
            terms: self
                .terms
                .iter()
                .map(|(w, &c)| (w.clone().push(letter), c))
                .collect(),
        }
    }
}

/// Shuffle product via `wi ⧢ vj = (w ⧢ vj)i + (wi ⧢ v)j` with
/// `w ⧢ ∅ = ∅ ⧢ w = w`.
pub fn shuffle_product(w: &Word, v: &Word) -> FormalWordSum {
    match (w.split_last(), v.split_last()) {
        (None, _) => FormalWordSum::from_word(v.clone()),
        (_, None) => FormalWordSum::from_word(w.clone()),
        (Some((w_init, i)), Some((v_init, j))) => {
            let left = shuffle_product(&w_init, v).append_letter(i);
            let right = shuffle_product(w, &v_init).append_letter(j);
            left.plus(&right)
        }
    }
}

/// Möbius function by trial-division factorisation.
pub fn mobius(n: u64) -> Result<i32> {
    if n == 0 {
        return Err(Error::InvalidParameter("mobius(n) requires n >= 1".into()));
    }
    let mut n = n;
    let mut sign = 1;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return Ok(0);
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    Ok(sign)
}

/// Dimension of the step-`depth` free nilpotent Lie algebra over `dim`
/// generators: `Σ_{n=1..N} (1/n) Σ_{ℓ|n} μ(n/ℓ) d^ℓ`, in exact arithmetic.
pub fn free_lie_dim(dim: u64, depth: u64) -> Result<u128> {
    if dim == 0 || depth == 0 {
        return Err(Error::InvalidParameter(
            "free_lie_dim requires d >= 1 and N >= 1".into(),
        ));
    }
    let overflow = || Error::Overflow(format!("free Lie dimension for d={dim}, N={depth}"));
    let mut total: u128 = 0;
    for n in 1..=depth {
        let mut inner: i128 = 0;
        for l in (1..=n).filter(|l| n % l == 0) {
            let mu = mobius(n / l)? as i128;
            if mu == 0 {
                continue;
            }
            let exp = u32::try_from(l).map_err(|_| overflow())?;
            let power = (dim as i128).checked_pow(exp).ok_or_else(overflow)?;
            inner = inner.checked_add(mu * power).ok_or_else(overflow)?;
        }
        // Necklace counts are integers, so the division is exact.
        let count = u128::try_from(inner / n as i128).map_err(|_| overflow())?;
        total = total.checked_add(count).ok_or_else(overflow)?;
    }
    Ok(total)
}
