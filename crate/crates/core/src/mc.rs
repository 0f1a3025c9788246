//! Reproducible Monte Carlo sampling.
//!
//! Every random draw comes from an [`RngStream`], a `(seed, stream_id)` pair
//! that addresses one ChaCha8 substream. Parallel estimators split their
//! samples into fixed-size blocks and give block `k` the stream `k`, so the
//! result depends only on the seed and the sample count, never on how many
//! worker threads picked up the blocks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Generator name recorded in report and CSV headers.
pub const GENERATOR: &str = "chacha8";

/// Samples handled by one substream in the block-parallel estimators.
pub const BLOCK_SIZE: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// A fresh generator positioned at the start of this substream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// n i.i.d. draws from uniform[low, high).
pub fn sample_uniform(stream: RngStream, n: usize, low: f64, high: f64) -> Result<Vec<f64>> {
    if !(low < high) || !low.is_finite() || !high.is_finite() {
        return Err(Error::BadSupport { low, high });
    }
    if n == 0 {
        return Err(Error::InsufficientSamples { got: 0, min: 1 });
    }
    let mut rng = stream.rng();
    let width = high - low;
    Ok((0..n).map(|_| low + width * rng.gen::<f64>()).collect())
}

/// Monte Carlo mean with its standard error and the stream it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithCI {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
    pub stream_id: u64,
}

impl EstimateWithCI {
    /// Half-width of the normal-approximation interval `mean ± z * std_error`.
    pub fn half_width(&self, z: f64) -> f64 {
        z * self.std_error
    }

    /// Number of standard errors separating the estimate from `target`.
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = (self.mean - target).abs();
        if self.std_error == 0.0 {
            if diff <= 1e-12 * target.abs().max(1.0) {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / self.std_error
        }
    }

    pub fn within_sigmas(&self, target: f64, sigmas: f64) -> bool {
        self.z_score(target) <= sigmas
    }
}

/// Streaming mean/variance (Welford) that can be merged with other partials.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MeanAccumulator {
    count: usize,
    mean: f64,
    m2: f64,
}

impl MeanAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Pooled combination of two partials.
    pub fn merge(&mut self, other: &MeanAccumulator) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n_a = self.count as f64;
        let n_b = other.count as f64;
        let n = n_a + n_b;
        let delta = other.mean - self.mean;
        self.mean += delta * n_b / n;
        self.m2 += other.m2 + delta * delta * n_a * n_b / n;
        self.count += other.count;
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn finish(&self, meta: RngStream) -> Result<EstimateWithCI> {
        if self.count < 2 {
            return Err(Error::InsufficientSamples { got: self.count, min: 2 });
        }
        let n = self.count as f64;
        let variance = (self.m2 / (n - 1.0)).max(0.0);
        Ok(EstimateWithCI {
            mean: self.mean,
            std_error: (variance / n).sqrt(),
            samples: self.count,
            seed: meta.seed,
            stream_id: meta.stream_id,
        })
    }
}

/// Mean and unbiased standard error of `values`.
pub fn estimate_mean(values: &[f64], meta: RngStream) -> Result<EstimateWithCI> {
    let mut acc = MeanAccumulator::new();
    values.iter().for_each(|&v| acc.push(v));
    acc.finish(meta)
}

/// Block layout for `samples` draws: `(stream index, block length)` pairs.
fn blocks(samples: usize) -> Vec<(u64, usize)> {
    (0..samples.div_ceil(BLOCK_SIZE))
        .map(|k| (k as u64, BLOCK_SIZE.min(samples - k * BLOCK_SIZE)))
        .collect()
}

/// Runs `block_fn` on every block in parallel and merges the per-block
/// results in block order.
///
/// `block_fn` receives the block's generator and its length and returns one
/// accumulator per tracked quantity (all blocks must return the same number).
pub fn simulate_blocks<F>(seed: u64, samples: usize, block_fn: F) -> Vec<MeanAccumulator>
where
    F: Fn(&mut ChaCha8Rng, usize) -> Vec<MeanAccumulator> + Sync,
{
    let partials: Vec<Vec<MeanAccumulator>> = blocks(samples)
        .into_par_iter()
        .map(|(stream_id, len)| {
            let mut rng = RngStream::new(seed, stream_id).rng();
            block_fn(&mut rng, len)
        })
        .collect();

    let mut merged: Vec<MeanAccumulator> = Vec::new();
    for partial in &partials {
        if merged.is_empty() {
            merged = vec![MeanAccumulator::new(); partial.len()];
        }
        for (total, part) in merged.iter_mut().zip(partial) {
            total.merge(part);
        }
    }
    merged
}

/// Mean of `draw` over `samples` independent evaluations, block-parallel.
pub fn simulate_mean<F>(seed: u64, samples: usize, draw: F) -> Result<EstimateWithCI>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let merged = simulate_blocks(seed, samples, |rng, len| {
        let mut acc = MeanAccumulator::new();
        for _ in 0..len {
            acc.push(draw(rng));
        }
        vec![acc]
    });
    merged
        .first()
        .copied()
        .unwrap_or_default()
        .finish(RngStream::new(seed, 0))
}

pub(crate) fn require_samples(got: usize, min: usize) -> Result<()> {
    if got < min {
        Err(Error::InsufficientSamples { got, min })
    } else {
        Ok(())
    }
}
