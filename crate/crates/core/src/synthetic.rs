//! Generated classification benchmarks.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::sde_lab::RngSpec;
use crate::signature::Path;

/// Labelled one-dimensional series.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelledSeries {
    pub id: String,
    pub label: String,
    pub path: Path,
}

/// Two-class task: `A·sin(2πt)` (label `sin`) against `A·cos(2πt)` (label
/// `cos`) on `points` equispaced times in `[0, 1]`, with amplitude
/// `A ~ U(0.8, 1.2)` and i.i.d. Gaussian observation noise of standard
/// deviation `noise`. Classes alternate, starting with `sin`; series `i`
/// draws from stream `stream_offset + i`.
pub fn sine_cosine(n: usize, points: usize, noise: f64, rng: RngSpec, stream_offset: u64) -> Vec<LabelledSeries> {
    assert!(points >= 2, "need at least two sample times");
    let times: Vec<f64> = (0..points).map(|i| i as f64 / (points - 1) as f64).collect();
    (0..n)
        .map(|i| {
            let mut r = rng.stream(stream_offset + i as u64);
            let amplitude = r.gen_range(0.8..1.2);
            let is_sin = i % 2 == 0;
            let values = times
                .iter()
                .map(|&t| {
                    let phase = 2.0 * std::f64::consts::PI * t;
                    let clean = if is_sin { phase.sin() } else { phase.cos() };
                    let eps: f64 = r.sample(StandardNormal);
                    amplitude * clean + noise * eps
                })
                .collect();
            LabelledSeries {
                id: format!("s{i}"),
                label: if is_sin { "sin" } else { "cos" }.to_string(),
                path: Path::from_scalars(times.clone(), values).expect("valid grid"),
            }
        })
        .collect()
}
