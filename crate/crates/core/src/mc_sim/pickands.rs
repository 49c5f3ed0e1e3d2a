use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimate::{count_hits, EstimateWithCI};

const BLOCK: u64 = 8192;

/// Discretised Pickands experiment: `P(max_{k >= 1, ak <= t_max} Z(ak) <= 0) / a`
/// with `Z(t) = min_i (√2 Y_i(t) - t² + E_i)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PickandsPlan {
    pub n: usize,
    pub a: f64,
    pub t_max: f64,
    pub samples: u64,
    pub seed: u64,
}

impl PickandsPlan {
    pub fn new(n: usize, a: f64, t_max: f64, samples: u64, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("n must be at least 1"));
        }
        if !(a > 0.0) || a > 0.1 {
            return Err(Error::domain(format!("grid spacing a must lie in (0, 0.1], got {a}")));
        }
        // at t_max a drift of 6 standard deviations and E = 10 can no longer reach 0
        let bound = t_max * t_max - std::f64::consts::SQRT_2 * 6.0 * t_max - 10.0;
        if !(bound > 0.0) {
            return Err(Error::domain(format!(
                "t_max = {t_max} is too short to capture the supremum"
            )));
        }
        if samples == 0 {
            return Err(Error::domain("samples must be positive"));
        }
        Ok(PickandsPlan {
            n,
            a,
            t_max,
            samples,
            seed,
        })
    }

    fn grid_len(&self) -> usize {
        (self.t_max / self.a + 1e-9).floor() as usize
    }
}

/// Monte Carlo estimate of the generalised Pickands constant at spacing `a`.
///
/// With `Cov(Y(t), Y(s)) = ts` on `[0, ∞)`, `Y(t) = t ξ` for one standard normal
/// `ξ`, so each sample needs only `n` normals and `n` unit exponentials.
pub fn estimate_pickands(plan: &PickandsPlan, workers: Option<usize>) -> EstimateWithCI {
    let n = plan.n;
    let steps = plan.grid_len();
    let a = plan.a;
    let hits = count_hits(plan.samples, BLOCK, plan.seed, workers, |rng, len| {
        let mut slope = vec![0.0; n];
        let mut offset = vec![0.0; n];
        let mut hits = 0;
        for _ in 0..len {
            for i in 0..n {
                let xi: f64 = rng.sample(StandardNormal);
                slope[i] = std::f64::consts::SQRT_2 * xi;
                offset[i] = rng.sample(Exp1);
            }
            let stays_below = (1..=steps).all(|k| {
                let t = k as f64 * a;
                let z = slope
                    .iter()
                    .zip(&offset)
                    .map(|(s, e)| s * t - t * t + e)
                    .fold(f64::INFINITY, f64::min);
                z <= 0.0
            });
            if stays_below {
                hits += 1;
            }
        }
        hits
    });
    EstimateWithCI::from_hits(hits, plan.samples, 1.0 / a, plan.seed)
}
