//! Simulation checks: empirical conjunction probabilities on a grid and the
//! generalised Pickands constant.

mod field;
mod pickands;

use rand::Rng;
use serde::Serialize;

use crate::asymptotics::conjunction_probability_asymptotic;
use crate::ball_geometry::DomainSpec;
use crate::error::{Error, Result};
use crate::estimate::{map_replicates, EstimateWithCI};

pub use field::{
    sample_field, spectral_lattice_covariance, FieldGrid, FieldModel, FieldSampler, DENSE_LIMIT,
    FACTOR_TOLERANCE, MAX_EXTENT, SPECTRAL_CUTOFF, SPECTRAL_MODES,
};
pub use pickands::{estimate_pickands, PickandsPlan};

pub const MAX_GRID_STEP: f64 = 0.1;
pub const MIN_REPLICATES: u64 = 1000;

/// Grid estimate of `P(max_t min_i X_i(t) >= u)` over an interval or box.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationPlan {
    pub n: usize,
    pub model: FieldModel,
    pub domain: DomainSpec,
    pub grid_step: f64,
    pub u: f64,
    pub replicates: u64,
    pub seed: u64,
}

impl SimulationPlan {
    pub fn new(
        n: usize,
        domain: DomainSpec,
        grid_step: f64,
        u: f64,
        replicates: u64,
        seed: u64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("n must be at least 1"));
        }
        if domain.sides().is_none() {
            return Err(Error::Unsupported("simulation needs an interval or box domain".into()));
        }
        if !(grid_step > 0.0) || grid_step > MAX_GRID_STEP {
            return Err(Error::domain(format!(
                "grid step must lie in (0, {MAX_GRID_STEP}], got {grid_step}"
            )));
        }
        if replicates < MIN_REPLICATES {
            return Err(Error::domain(format!(
                "at least {MIN_REPLICATES} replicates are required, got {replicates}"
            )));
        }
        if !u.is_finite() {
            return Err(Error::domain("threshold must be finite"));
        }
        let model = FieldModel::squared_exponential(domain.dim())?;
        Ok(SimulationPlan {
            n,
            model,
            domain,
            grid_step,
            u,
            replicates,
            seed,
        })
    }

    /// Per-axis coordinates `0, h, 2h, ...` up to the side length.
    pub fn grid(&self) -> FieldGrid {
        let sides = self.domain.sides().expect("validated box domain");
        FieldGrid::Cartesian(
            sides
                .iter()
                .map(|&side| {
                    let count = (side / self.grid_step + 1e-9).floor() as usize + 1;
                    (0..count).map(|k| k as f64 * self.grid_step).collect()
                })
                .collect(),
        )
    }
}

/// `max_t min_i X_i(t)` for each replicate, all `n` copies drawn independently.
pub fn simulate_sup_min(plan: &SimulationPlan, workers: Option<usize>) -> Result<Vec<f64>> {
    let sampler = FieldSampler::new(&plan.model, &plan.grid())?;
    let len = sampler.len();
    Ok(map_replicates(plan.replicates, plan.seed, workers, |rng, _| {
        sup_min(&sampler, plan.n, len, rng)
    }))
}

fn sup_min<R: Rng + ?Sized>(sampler: &FieldSampler, n: usize, len: usize, rng: &mut R) -> f64 {
    let mut running = vec![f64::INFINITY; len];
    let mut draw = vec![0.0; len];
    for _ in 0..n {
        sampler.sample_into(rng, &mut draw);
        running.iter_mut().zip(&draw).for_each(|(m, x)| *m = m.min(*x));
    }
    running.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn exceedance(values: &[f64], u: f64, seed: u64) -> EstimateWithCI {
    let hits = values.iter().filter(|&&v| v >= u).count() as u64;
    EstimateWithCI::from_hits(hits, values.len() as u64, 1.0, seed)
}

/// Fraction of replicates whose grid maximum of `min_i X_i` reaches `plan.u`.
pub fn estimate_conjunction_probability(
    plan: &SimulationPlan,
    workers: Option<usize>,
) -> Result<EstimateWithCI> {
    let values = simulate_sup_min(plan, workers)?;
    Ok(exceedance(&values, plan.u, plan.seed))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub u: f64,
    pub empirical: f64,
    pub std_error: f64,
    pub asymptotic: f64,
    pub ratio: f64,
}

/// Empirical probability against the leading-order asymptotic for each
/// threshold. One set of replicates is simulated and thresholded at every `u`.
pub fn compare_asymptotic(
    plan: &SimulationPlan,
    u_grid: &[f64],
    workers: Option<usize>,
) -> Result<Vec<ComparisonRow>> {
    if u_grid.is_empty() {
        return Ok(Vec::new());
    }
    if let Some(u) = u_grid.iter().find(|u| !(**u > 0.0) || !u.is_finite()) {
        return Err(Error::domain(format!("thresholds must be positive, got {u}")));
    }
    let values = simulate_sup_min(plan, workers)?;
    let (d, volume) = (plan.domain.dim(), plan.domain.volume());
    u_grid
        .iter()
        .map(|&u| {
            let est = exceedance(&values, u, plan.seed);
            let asymptotic = conjunction_probability_asymptotic(plan.n, d, u, volume)?;
            Ok(ComparisonRow {
                u,
                empirical: est.mean,
                std_error: est.std_error,
                asymptotic,
                ratio: est.mean / asymptotic,
            })
        })
        .collect()
}
