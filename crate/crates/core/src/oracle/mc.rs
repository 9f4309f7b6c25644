//! Reproducible Monte Carlo: counter-based ChaCha streams, fixed-size
//! chunks and an order-fixed merge, so results do not depend on the number
//! of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid, Result};

pub type McStream = ChaCha8Rng;

/// Samples per stream.
pub const CHUNK_SIZE: usize = 4096;

/// Independent, reproducible random stream `stream_index` of `seed`.
pub fn mc_stream(seed: u64, stream_index: u64) -> McStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl McEstimate {
    pub fn relative_stderr(&self) -> f64 {
        self.stderr / self.mean.abs()
    }

    /// Distance to `target` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target) / self.stderr
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Self) -> Self {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let w = other.n as f64 / n as f64;
        Self {
            n,
            mean: self.mean + d * w,
            m2: self.m2 + other.m2 + d * d * self.n as f64 * w,
        }
    }
}

/// Mean of `n_samples` draws of `sample`, with stream `stream_base + c`
/// feeding chunk `c`.
pub fn estimate<F>(seed: u64, stream_base: u64, n_samples: u64, sample: F) -> Result<McEstimate>
where
    F: Fn(&mut McStream) -> Result<f64> + Sync,
{
    if n_samples < 2 {
        return Err(invalid("samples", "at least 2 samples are needed"));
    }
    let chunk = CHUNK_SIZE as u64;
    let n_chunks = n_samples.div_ceil(chunk);
    let parts: Vec<Moments> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = mc_stream(seed, stream_base + c);
            let count = chunk.min(n_samples - c * chunk);
            let mut m = Moments::default();
            for _ in 0..count {
                m.push(sample(&mut rng)?);
            }
            Ok(m)
        })
        .collect::<Result<_>>()?;
    let total = parts.into_iter().fold(Moments::default(), Moments::merge);
    let var = total.m2 / (total.n - 1) as f64;
    Ok(McEstimate {
        mean: total.mean,
        stderr: (var / total.n as f64).sqrt(),
        n_samples: total.n,
        seed,
    })
}
