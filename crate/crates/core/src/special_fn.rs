//! Scalar special functions: log-gamma, probabilists' Hermite polynomials,
//! unit-ball volumes, the standard normal density and tail, and the flag
//! coefficients of integral geometry.
//!
//! Everything that multiplies or divides several gamma values works with
//! logarithms and exponentiates once at the end, so products stay finite for
//! dimensions up to about 64.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LN_PI: f64 = 1.144_729_885_849_400_2;
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(ln_gamma(x))
}

/// Unchecked `ln Γ(x)`; callers guarantee `x > 0`.
#[inline]
pub(crate) fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    statrs::function::gamma::ln_gamma(x)
}

/// Probabilists' Hermite polynomial `H_j(x)`, built with
/// `H_{j+1} = x H_j - j H_{j-1}`.
pub fn hermite(j: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if j == 0 {
        return prev;
    }
    let mut cur = x;
    for k in 1..j {
        let next = x * cur - k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `ln ω_k`, the log volume of the unit ball in `R^k`.
#[inline]
pub(crate) fn ln_unit_ball_volume(k: usize) -> f64 {
    let half = k as f64 / 2.0;
    half * LN_PI - ln_gamma(1.0 + half)
}

/// Volume of the unit ball in `R^k`: `ω_k = π^{k/2} / Γ(1 + k/2)`.
pub fn unit_ball_volume(k: usize) -> f64 {
    match k {
        0 => 1.0,
        1 => 2.0,
        2 => PI,
        _ => ln_unit_ball_volume(k).exp(),
    }
}

/// Standard normal density `φ(u)`.
#[inline]
pub fn gaussian_pdf(u: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * u * u).exp()
}

/// Standard normal upper tail `Φ̄(u) = P(N(0,1) ≥ u)`.
#[inline]
pub fn gaussian_tail(u: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(u / std::f64::consts::SQRT_2)
}

/// `ln binom(m, j)`.
#[inline]
pub(crate) fn ln_binomial(m: usize, j: usize) -> f64 {
    debug_assert!(j <= m);
    ln_gamma(m as f64 + 1.0) - ln_gamma(j as f64 + 1.0) - ln_gamma((m - j) as f64 + 1.0)
}

pub(crate) fn binomial(m: usize, j: usize) -> f64 {
    ln_binomial(m, j).exp().round()
}

/// Flag coefficient `[m j] = ω_m / (ω_j ω_{m-j}) · binom(m, j)`.
pub fn flag_coefficient(m: usize, j: usize) -> Result<f64> {
    if j > m {
        return Err(Error::domain(format!(
            "flag coefficient requires j <= m, got m={m}, j={j}"
        )));
    }
    let ln = ln_unit_ball_volume(m) - ln_unit_ball_volume(j) - ln_unit_ball_volume(m - j)
        + ln_binomial(m, j);
    Ok(ln.exp())
}
