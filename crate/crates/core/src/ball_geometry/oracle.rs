use rand::Rng;

use super::feasibility::intersect_flat;
use super::BallConfiguration;
use crate::error::{Error, Result};
use crate::estimate::{count_hits, EstimateWithCI};

pub const MIN_ORACLE_SAMPLES: u64 = 10_000;
const BLOCK: u64 = 4096;

/// Monte Carlo estimate of the feasible centre-set volume.
///
/// `t_1` sits at the origin and each `t_i` is drawn uniformly from
/// `[-(r_1 + r_i), r_1 + r_i]^d`, the smallest box containing every centre
/// that can still meet `B(0, r_1)`.
pub fn intersection_volume_mc(
    config: &BallConfiguration,
    samples: u64,
    seed: u64,
    workers: Option<usize>,
) -> Result<EstimateWithCI> {
    if samples < MIN_ORACLE_SAMPLES {
        return Err(Error::domain(format!(
            "at least {MIN_ORACLE_SAMPLES} samples are required, got {samples}"
        )));
    }
    let (n, d, radii) = (config.n(), config.d(), config.radii());
    let half_widths: Vec<f64> = radii.iter().map(|r| radii[0] + r).collect();
    let box_volume: f64 = half_widths[1..].iter().map(|h| (2.0 * h).powi(d as i32)).product();

    let hits = count_hits(samples, BLOCK, seed, workers, |rng, len| {
        let mut centers = vec![0.0; n * d];
        let mut scratch = vec![0.0; d];
        let mut hits = 0;
        for _ in 0..len {
            for i in 1..n {
                let h = half_widths[i];
                for x in &mut centers[i * d..(i + 1) * d] {
                    *x = rng.random_range(-h..=h);
                }
            }
            if intersect_flat(&centers, d, radii, &mut scratch) {
                hits += 1;
            }
        }
        hits
    });
    Ok(EstimateWithCI::from_hits(hits, samples, box_volume, seed))
}
