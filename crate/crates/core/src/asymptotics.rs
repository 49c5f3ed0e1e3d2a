//! Leading-order asymptotics of the conjunction probability
//! `P(max_{t in S} min_i X_i(t) >= u)` for `n` independent copies of a smooth
//! stationary unit-variance field with identity gradient covariance.
//!
//! Two routes produce the same constant: [`proposition1_coefficient`] takes
//! any homogeneous volume polynomial and integrates the radii against the
//! local-maximum heights, while [`theorem1_coefficient`] sums the closed
//! nested expression directly and never touches `ball_geometry`. Only the
//! leading term is modelled; the `o(1)` remainder has no known rate.

use std::f64::consts::{LN_2, PI};

use serde::Serialize;

use crate::ball_geometry::VolumePolynomial;
use crate::error::{Error, Result};
use crate::special_fn::{gaussian_pdf, ln_gamma, ln_unit_ball_volume};

/// `P ≈ u^{power_of_u} φ(u)^{phi_power} λ_d(S) · leading_constant`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticCoefficient {
    pub n: usize,
    pub d: usize,
    pub leading_constant: f64,
    pub power_of_u: i64,
    pub phi_power: usize,
}

impl AsymptoticCoefficient {
    /// Leading-term probability for threshold `u` and domain volume `volume`.
    pub fn probability(&self, u: f64, volume: f64) -> f64 {
        let ln = self.power_of_u as f64 * u.ln()
            + self.phi_power as f64 * gaussian_pdf(u).ln()
            + volume.ln()
            + self.leading_constant.ln();
        ln.exp()
    }
}

/// Per-unit-volume constant `2^{k/2} (2π)^{-nd/2} sum_m C_m prod_i Γ(1 + m_i/2)`
/// for a homogeneous volume polynomial of degree `k`, with u-exponent `nd - n - k`.
pub fn proposition1_coefficient(
    poly: &VolumePolynomial,
    n: usize,
    d: usize,
) -> Result<AsymptoticCoefficient> {
    if poly.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "polynomial has {} radii but n = {n}",
            poly.n()
        )));
    }
    if d == 0 {
        return Err(Error::domain("d must be at least 1"));
    }
    let k = poly.degree()?;
    let prefactor = 0.5 * k as f64 * LN_2 - 0.5 * (n * d) as f64 * (2.0 * PI).ln();
    let sum: f64 = poly
        .terms()
        .iter()
        .map(|(m, c)| {
            let ln_g: f64 = m.iter().map(|&mi| ln_gamma(1.0 + mi as f64 / 2.0)).sum();
            (prefactor + c.ln() + ln_g).exp()
        })
        .sum();
    Ok(AsymptoticCoefficient {
        n,
        d,
        leading_constant: sum,
        power_of_u: (n * d) as i64 - n as i64 - k as i64,
        phi_power: n,
    })
}

/// Leading constant by direct summation of the nested closed form
/// `(2π)^{-d/2} sum ω_d / (ω_j prod ω_{d-k_i}) · d! / (j! prod (d-k_i)!)`,
/// `j = sum k_i - (n-2)d`.
pub fn theorem1_coefficient(n: usize, d: usize) -> Result<AsymptoticCoefficient> {
    if n == 0 || d == 0 {
        return Err(Error::domain("n and d must be at least 1"));
    }
    if n * d > crate::ball_geometry::MAX_TOTAL_DIMENSION {
        return Err(Error::size(format!("n*d = {} exceeds 64", n * d)));
    }
    let ln_fact = |x: usize| ln_gamma(x as f64 + 1.0);
    let base = -0.5 * d as f64 * (2.0 * PI).ln() + ln_unit_ball_volume(d) + ln_fact(d);

    // walk k_n, k_{n-1}, ..., k_2, carrying sum k_i and sum ln(ω_{d-k_i} (d-k_i)!)
    fn walk(
        n: usize,
        d: usize,
        level: usize,
        k_sum: usize,
        ln_den: f64,
        base: f64,
        ln_fact: &dyn Fn(usize) -> f64,
    ) -> f64 {
        if level < 2 {
            let j = k_sum + 2 * d - n * d;
            let ln_term = base - ln_unit_ball_volume(j) - ln_fact(j) - ln_den;
            return ln_term.exp();
        }
        let lower = ((n - level) * d).saturating_sub(k_sum);
        (lower..=d)
            .map(|k| {
                let g = d - k;
                walk(
                    n,
                    d,
                    level - 1,
                    k_sum + k,
                    ln_den + ln_unit_ball_volume(g) + ln_fact(g),
                    base,
                    ln_fact,
                )
            })
            .sum()
    }

    let constant = walk(n, d, n, 0, 0.0, base, &ln_fact);
    Ok(AsymptoticCoefficient {
        n,
        d,
        leading_constant: constant,
        power_of_u: d as i64 - n as i64,
        phi_power: n,
    })
}

/// `u^{d-n} φ(u)^n · volume · theorem1_coefficient(n, d)`.
pub fn conjunction_probability_asymptotic(n: usize, d: usize, u: f64, volume: f64) -> Result<f64> {
    if !(u > 0.0) || !u.is_finite() {
        return Err(Error::domain(format!("threshold u must be positive, got {u}")));
    }
    if !(volume > 0.0) || !volume.is_finite() {
        return Err(Error::domain(format!("volume must be positive, got {volume}")));
    }
    Ok(theorem1_coefficient(n, d)?.probability(u, volume))
}
