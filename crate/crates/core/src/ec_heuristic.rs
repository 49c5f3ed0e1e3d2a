//! Euler-characteristic prediction for the conjunction probability:
//! `(1, 0, ..., 0) R^n (μ_0 b_0, ..., μ_d b_d)^T` with `R` the upper-triangular
//! Toeplitz matrix of scaled EC densities.

use std::f64::consts::PI;

use serde::Serialize;

use crate::ball_geometry::DomainSpec;
use crate::error::{Error, Result};
use crate::special_fn::{gaussian_tail, hermite, ln_gamma};

/// `b_i = Γ((i+1)/2) / Γ(1/2)` for `i = 0..=d`.
pub fn b_constants(d: usize) -> Vec<f64> {
    let ln_half = ln_gamma(0.5);
    (0..=d)
        .map(|i| match i {
            0 => 1.0,
            2 => 0.5,
            _ => (ln_gamma((i as f64 + 1.0) / 2.0) - ln_half).exp(),
        })
        .collect()
}

/// EC densities `ρ_0 = Φ̄(u)`, `ρ_i = (2π)^{-(i+1)/2} H_{i-1}(u) e^{-u²/2}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EcDensities {
    pub u: f64,
    pub rho: Vec<f64>,
}

pub fn ec_densities(d: usize, u: f64) -> EcDensities {
    let gauss = (-0.5 * u * u).exp();
    let rho = (0..=d)
        .map(|i| {
            if i == 0 {
                gaussian_tail(u)
            } else {
                (2.0 * PI).powf(-(i as f64 + 1.0) / 2.0) * hermite(i - 1, u) * gauss
            }
        })
        .collect();
    EcDensities { u, rho }
}

/// Upper-triangular Toeplitz matrix with `(i, j)` entry `ρ_{j-i} / b_{j-i}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RMatrix {
    pub d: usize,
    pub u: f64,
    pub entries: Vec<Vec<f64>>,
}

impl RMatrix {
    pub fn new(d: usize, u: f64) -> Self {
        let rho = ec_densities(d, u).rho;
        let b = b_constants(d);
        let diag: Vec<f64> = rho.iter().zip(&b).map(|(r, b)| r / b).collect();
        let entries = (0..=d)
            .map(|i| (0..=d).map(|j| if j >= i { diag[j - i] } else { 0.0 }).collect())
            .collect();
        RMatrix { d, u, entries }
    }

    /// Product of two upper-triangular matrices; the lower triangle stays exactly zero.
    fn mul(&self, other: &RMatrix) -> RMatrix {
        let size = self.d + 1;
        let mut entries = vec![vec![0.0; size]; size];
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate().skip(i) {
                *cell = (i..=j).map(|k| self.entries[i][k] * other.entries[k][j]).sum();
            }
        }
        RMatrix {
            d: self.d,
            u: self.u,
            entries,
        }
    }

    /// `R^n` by repeated multiplication, `n >= 1`.
    pub fn pow(&self, n: usize) -> RMatrix {
        assert!(n >= 1, "matrix power needs n >= 1");
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.mul(self);
        }
        acc
    }
}

/// First entry of `R^n (μ_0 b_0, ..., μ_d b_d)^T`.
pub fn ec_prediction(n: usize, d: usize, u: f64, domain: &DomainSpec) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    if domain.minkowski.len() != d + 1 {
        return Err(Error::DimensionMismatch(format!(
            "domain has {} Minkowski functionals, expected d + 1 = {}",
            domain.minkowski.len(),
            d + 1
        )));
    }
    let power = RMatrix::new(d, u).pow(n);
    let b = b_constants(d);
    Ok(power.entries[0]
        .iter()
        .zip(domain.minkowski.iter().zip(&b))
        .map(|(r, (mu, b))| r * mu * b)
        .sum())
}

/// Coefficient of `u^{d-n} φ(u)^n λ_d(S)` in the EC prediction:
/// `(2π)^{-d/2} sum_{0 <= h_1 <= ... <= h_{n-1} <= d}
///  Γ(1/2)^{n-1} Γ((d+1)/2) / prod Γ((Δ+1)/2)` over the gaps `Δ` of `h`.
pub fn ec_volume_term_coefficient(n: usize, d: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    let ln_numerator = (n - 1) as f64 * ln_gamma(0.5) + ln_gamma((d as f64 + 1.0) / 2.0)
        - 0.5 * d as f64 * (2.0 * PI).ln();
    let ln_gap = |g: usize| ln_gamma((g as f64 + 1.0) / 2.0);

    // remaining: how many h's still to place; prev: last placed h
    fn gaps(remaining: usize, prev: usize, d: usize, ln_den: f64, ln_num: f64, ln_gap: &dyn Fn(usize) -> f64) -> f64 {
        if remaining == 0 {
            return (ln_num - ln_den - ln_gap(d - prev)).exp();
        }
        (prev..=d)
            .map(|h| gaps(remaining - 1, h, d, ln_den + ln_gap(h - prev), ln_num, ln_gap))
            .sum()
    }
    Ok(gaps(n - 1, 0, d, 0.0, ln_numerator, &ln_gap))
}

/// Relative gap between the leading asymptotic constant and the EC volume term.
pub fn identity_check(n: usize, d: usize) -> Result<f64> {
    let t = crate::asymptotics::theorem1_coefficient(n, d)?.leading_constant;
    let e = ec_volume_term_coefficient(n, d)?;
    Ok(((t - e) / t).abs())
}
