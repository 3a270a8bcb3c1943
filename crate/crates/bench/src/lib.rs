//! Fixtures shared by the criterion benches.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sigreg::Path;

/// Random walk with uniform increments in `[-1, 1)` on `0, 1, …, segments`.
pub fn random_walk(segments: usize, dim: usize, seed: u64) -> Path {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = vec![0.0; dim];
    for i in 0..segments {
        for c in 0..dim {
            let prev = values[i * dim + c];
            values.push(prev + rng.gen_range(-1.0..1.0));
        }
    }
    let times = (0..=segments).map(|t| t as f64).collect();
    Path::from_flat(times, values, dim).expect("valid walk")
}
