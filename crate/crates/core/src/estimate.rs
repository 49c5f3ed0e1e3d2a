//! Monte Carlo estimates and the seeded, worker-count-independent driver
//! shared by every stochastic routine.
//!
//! Work is cut into fixed blocks. Block `b` draws from a ChaCha8 generator
//! seeded with the user seed and switched to stream `b`, so a block produces
//! the same numbers whichever thread runs it. Blocks report integer hit
//! counts which are summed exactly.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateWithCI {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(samples)`.
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

impl EstimateWithCI {
    /// Estimate of `scale * p` from `hits` successes in `samples` Bernoulli trials.
    pub fn from_hits(hits: u64, samples: u64, scale: f64, seed: u64) -> Self {
        assert!(samples > 0 && hits <= samples);
        let p = hits as f64 / samples as f64;
        let var = if samples > 1 {
            p * (1.0 - p) / (samples - 1) as f64
        } else {
            0.0
        };
        EstimateWithCI {
            mean: scale * p,
            std_error: scale * var.sqrt(),
            samples,
            seed,
        }
    }

    /// Half-width of the symmetric interval at `z` standard errors.
    pub fn half_width(&self, z: f64) -> f64 {
        z * self.std_error
    }

    pub fn interval(&self, z: f64) -> (f64, f64) {
        (self.mean - self.half_width(z), self.mean + self.half_width(z))
    }
}

/// Generator for stream `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn with_workers<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> T {
    match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .expect("failed to build worker pool")
            .install(job),
        None => job(),
    }
}

/// Runs `total` trials in blocks of `block`; `trial_block(rng, len)` returns
/// the number of hits among `len` trials.
pub(crate) fn count_hits<F>(
    total: u64,
    block: u64,
    seed: u64,
    workers: Option<usize>,
    trial_block: F,
) -> u64
where
    F: Fn(&mut ChaCha8Rng, u64) -> u64 + Sync,
{
    let block = block.max(1);
    let n_blocks = total.div_ceil(block);
    with_workers(workers, || {
        (0..n_blocks)
            .into_par_iter()
            .map(|b| {
                let len = block.min(total - b * block);
                let mut rng = stream_rng(seed, b);
                trial_block(&mut rng, len)
            })
            .sum()
    })
}

/// Evaluates `replicate(rng, index)` for every index with its own stream and
/// returns the results in index order.
pub(crate) fn map_replicates<T, F>(
    total: u64,
    seed: u64,
    workers: Option<usize>,
    replicate: F,
) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    with_workers(workers, || {
        (0..total)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream_rng(seed, i);
                replicate(&mut rng, i)
            })
            .collect()
    })
}
