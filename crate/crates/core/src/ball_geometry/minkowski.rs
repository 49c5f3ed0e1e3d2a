use serde::Serialize;

use crate::error::{Error, Result};
use crate::special_fn::{binomial, unit_ball_volume};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainKind {
    /// `[0, length]`
    Interval { length: f64 },
    /// `[0, s_1] x ... x [0, s_d]`
    Box { sides: Vec<f64> },
    /// Closed ball of the given radius in `R^d`.
    Ball { d: usize, radius: f64 },
}

/// Index set together with its Minkowski functionals `(μ_0, ..., μ_d)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub minkowski: Vec<f64>,
}

impl DomainSpec {
    pub fn interval(length: f64) -> Result<Self> {
        let minkowski = box_minkowski(&[length])?;
        Ok(DomainSpec {
            kind: DomainKind::Interval { length },
            minkowski,
        })
    }

    pub fn cuboid(sides: Vec<f64>) -> Result<Self> {
        let minkowski = box_minkowski(&sides)?;
        Ok(DomainSpec {
            kind: DomainKind::Box { sides },
            minkowski,
        })
    }

    pub fn ball(d: usize, radius: f64) -> Result<Self> {
        let minkowski = ball_minkowski(d, radius)?;
        Ok(DomainSpec {
            kind: DomainKind::Ball { d, radius },
            minkowski,
        })
    }

    pub fn dim(&self) -> usize {
        self.minkowski.len() - 1
    }

    /// Lebesgue volume, `μ_d`.
    pub fn volume(&self) -> f64 {
        *self.minkowski.last().expect("at least μ_0")
    }

    /// Side lengths for interval and box domains.
    pub fn sides(&self) -> Option<Vec<f64>> {
        match &self.kind {
            DomainKind::Interval { length } => Some(vec![*length]),
            DomainKind::Box { sides } => Some(sides.clone()),
            DomainKind::Ball { .. } => None,
        }
    }
}

/// `μ_j(B(0, r)) = ω_d / ω_{d-j} binom(d, j) r^j`.
pub fn ball_minkowski(d: usize, r: f64) -> Result<Vec<f64>> {
    if d == 0 {
        return Err(Error::domain("ball dimension must be at least 1"));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::domain(format!("ball radius must be positive, got {r}")));
    }
    let omega_d = unit_ball_volume(d);
    Ok((0..=d)
        .map(|j| omega_d / unit_ball_volume(d - j) * binomial(d, j) * r.powi(j as i32))
        .collect())
}

/// Minkowski functionals of an axis-aligned box: the elementary symmetric
/// polynomials of the side lengths.
pub fn box_minkowski(sides: &[f64]) -> Result<Vec<f64>> {
    if sides.is_empty() {
        return Err(Error::domain("a box needs at least one side"));
    }
    if let Some(s) = sides.iter().find(|s| !(**s > 0.0) || !s.is_finite()) {
        return Err(Error::domain(format!("side lengths must be positive, got {s}")));
    }
    let mut e = vec![0.0; sides.len() + 1];
    e[0] = 1.0;
    for (k, &s) in sides.iter().enumerate() {
        for j in (1..=k + 1).rev() {
            e[j] += s * e[j - 1];
        }
    }
    Ok(e)
}

/// Tube volume `sum_j ε^{d-j} ω_{d-j} μ_j`.
pub fn weyl_tube_volume(minkowski: &[f64], eps: f64) -> f64 {
    let d = minkowski.len() - 1;
    minkowski
        .iter()
        .enumerate()
        .map(|(j, mu)| eps.powi((d - j) as i32) * unit_ball_volume(d - j) * mu)
        .sum()
}
