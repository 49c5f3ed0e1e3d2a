//! Volume of the set of ball-centre configurations whose balls share a point.
//!
//! With `t_1` pinned at the origin, the set of `(t_2, ..., t_n)` in
//! `R^{(n-1)d}` for which `B(t_1, r_1), ..., B(t_n, r_n)` have a common point
//! has a Lebesgue measure that is a homogeneous polynomial of degree
//! `(n-1)d` in the radii. [`intersection_volume_polynomial`] builds it by the
//! nested Weyl/Crofton sums, [`coefficient_symmetric_form`] gives the same
//! coefficients as a closed product, and [`intersection_volume_mc`] estimates
//! the volume by sampling.

mod feasibility;
mod minkowski;
mod oracle;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::special_fn::{ln_gamma, ln_unit_ball_volume, unit_ball_volume};

pub use feasibility::{balls_intersect, FEASIBILITY_SWEEPS, FEASIBILITY_TOLERANCE};
pub use minkowski::{ball_minkowski, box_minkowski, weyl_tube_volume, DomainKind, DomainSpec};
pub use oracle::{intersection_volume_mc, MIN_ORACLE_SAMPLES};

/// Largest `n * d` accepted by the polynomial builders.
pub const MAX_TOTAL_DIMENSION: usize = 64;

/// `n` ball radii in dimension `d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallConfiguration {
    d: usize,
    radii: Vec<f64>,
}

impl BallConfiguration {
    pub fn new(d: usize, radii: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return Err(Error::domain("dimension d must be at least 1"));
        }
        if radii.is_empty() {
            return Err(Error::domain("at least one radius is required"));
        }
        if let Some(r) = radii.iter().find(|r| !(**r > 0.0) || !r.is_finite()) {
            return Err(Error::domain(format!("radii must be positive and finite, got {r}")));
        }
        Ok(BallConfiguration { d, radii })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.radii.len()
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Same configuration with every radius multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.d, self.radii.iter().map(|r| r * s).collect())
    }
}

/// Multi-index `m = (m_1, ..., m_n)`; position 0 belongs to the pinned ball.
pub type MultiIndex = Vec<usize>;

/// Homogeneous polynomial `sum_m C_m r^m` in `n` radii.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolumePolynomial {
    n: usize,
    d: usize,
    terms: BTreeMap<MultiIndex, f64>,
}

impl VolumePolynomial {
    /// Arbitrary polynomial with positive coefficients, each key of length `n`.
    /// Duplicate keys are merged by addition.
    pub fn from_terms(
        n: usize,
        d: usize,
        terms: impl IntoIterator<Item = (MultiIndex, f64)>,
    ) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::domain("n and d must be at least 1"));
        }
        let mut map = BTreeMap::new();
        for (m, c) in terms {
            if m.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "multi-index {m:?} has {} entries, expected {n}",
                    m.len()
                )));
            }
            if !(c > 0.0) || !c.is_finite() {
                return Err(Error::domain(format!("coefficient for {m:?} must be positive, got {c}")));
            }
            *map.entry(m).or_insert(0.0) += c;
        }
        if map.is_empty() {
            return Err(Error::domain("polynomial has no terms"));
        }
        Ok(VolumePolynomial { n, d, terms: map })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, f64> {
        &self.terms
    }

    pub fn coefficient(&self, m: &[usize]) -> Option<f64> {
        self.terms.get(m).copied()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Common total degree of the terms.
    pub fn degree(&self) -> Result<usize> {
        let mut degrees = self.terms.keys().map(|m| m.iter().sum::<usize>());
        let first = degrees.next().expect("non-empty polynomial");
        for other in degrees {
            if other != first {
                return Err(Error::Inhomogeneous { first, second: other });
            }
        }
        Ok(first)
    }

    /// `sum_m C_m prod_i r_i^{m_i}`.
    pub fn evaluate(&self, radii: &[f64]) -> Result<f64> {
        if radii.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "polynomial in {} radii evaluated at {} radii",
                self.n,
                radii.len()
            )));
        }
        Ok(self
            .terms
            .iter()
            .map(|(m, c)| {
                c * m
                    .iter()
                    .zip(radii)
                    .map(|(&e, &r)| r.powi(e as i32))
                    .product::<f64>()
            })
            .sum())
    }
}

fn check_size(n: usize, d: usize) -> Result<()> {
    if n == 0 || d == 0 {
        return Err(Error::domain("n and d must be at least 1"));
    }
    if n * d > MAX_TOTAL_DIMENSION {
        return Err(Error::size(format!(
            "n*d = {} exceeds the supported maximum {MAX_TOTAL_DIMENSION}",
            n * d
        )));
    }
    Ok(())
}

/// Builds the volume polynomial by the nested sums over `k_n, k_{n-1}, ..., k_2`.
///
/// `k_j` runs over `[max(0, (n-j)d - sum_{i>j} k_i), d]`; the remaining
/// exponent `(n-1)d - sum k_i` belongs to `r_1`.
pub fn intersection_volume_polynomial(n: usize, d: usize) -> Result<VolumePolynomial> {
    check_size(n, d)?;
    let mut terms = Vec::new();
    // ks[j] holds k_{j+2}, filled from the back.
    let mut ks = vec![0usize; n - 1];
    nested_terms(n, d, n, 0, &mut ks, &mut terms);
    VolumePolynomial::from_terms(n, d, terms)
}

/// Recursion over `j = n, n-1, ..., 2`; `tail_sum` is `sum_{i>j} k_i`.
fn nested_terms(
    n: usize,
    d: usize,
    j: usize,
    tail_sum: usize,
    ks: &mut [usize],
    out: &mut Vec<(MultiIndex, f64)>,
) {
    if j < 2 {
        out.push(finalvo_term(n, d, ks, tail_sum));
        return;
    }
    let lower = ((n - j) * d).saturating_sub(tail_sum);
    for k in lower..=d {
        ks[j - 2] = k;
        nested_terms(n, d, j - 1, tail_sum + k, ks, out);
    }
}

/// One summand of the nested formula, evaluated in log space.
fn finalvo_term(n: usize, d: usize, ks: &[usize], k_sum: usize) -> (MultiIndex, f64) {
    let m1 = (n - 1) * d - k_sum;
    // sum k_i - (n-2)d, which equals d - m1
    let shifted = k_sum + 2 * d - n * d;
    let ln_fact = |x: usize| ln_gamma(x as f64 + 1.0);

    let mut ln_c = ln_unit_ball_volume(d) + ln_unit_ball_volume(m1)
        - ln_unit_ball_volume(shifted)
        + ln_fact(d)
        - ln_fact(shifted);
    for &k in ks {
        ln_c += ln_unit_ball_volume(k) - ln_unit_ball_volume(d - k) - ln_fact(d - k);
    }

    let mut m = Vec::with_capacity(n);
    m.push(m1);
    m.extend_from_slice(ks);
    (m, ln_c.exp())
}

/// `C_m = ω_d d! prod_i ω_{m_i} / (ω_{d-m_i} (d-m_i)!)`.
pub fn coefficient_symmetric_form(m: &[usize], d: usize) -> Result<f64> {
    let n = m.len();
    check_size(n, d)?;
    if m.iter().any(|&mi| mi > d) {
        return Err(Error::domain(format!("entries of {m:?} must not exceed d = {d}")));
    }
    let total: usize = m.iter().sum();
    if total != (n - 1) * d {
        return Err(Error::domain(format!(
            "multi-index {m:?} has norm {total}, expected (n-1)d = {}",
            (n - 1) * d
        )));
    }
    let ln_fact = |x: usize| ln_gamma(x as f64 + 1.0);
    let ln_c = ln_unit_ball_volume(d)
        + ln_fact(d)
        + m.iter()
            .map(|&mi| ln_unit_ball_volume(mi) - ln_unit_ball_volume(d - mi) - ln_fact(d - mi))
            .sum::<f64>();
    Ok(ln_c.exp())
}

/// Volume of the feasible centre set from the general polynomial.
pub fn intersection_volume_closed(config: &BallConfiguration) -> Result<f64> {
    intersection_volume_polynomial(config.n(), config.d())?.evaluate(config.radii())
}

/// Volume from the dedicated closed forms: `n = 2` (a ball of radius
/// `r_1 + r_2`), `d = 1` and `d = 2`.
pub fn intersection_volume_special(config: &BallConfiguration) -> Result<f64> {
    let (n, d, r) = (config.n(), config.d(), config.radii());
    if n == 1 {
        return Ok(1.0);
    }
    if n == 2 {
        return Ok(unit_ball_volume(d) * (r[0] + r[1]).powi(d as i32));
    }
    match d {
        1 => {
            let sum: f64 = (0..n).map(|i| product_except(r, &[i], 1)).sum();
            Ok(2f64.powi(n as i32 - 1) * sum)
        }
        2 => {
            let singles: f64 = (0..n).map(|i| product_except(r, &[i], 2)).sum();
            let mut pairs = 0.0;
            for i in 0..n {
                for j in i + 1..n {
                    pairs += r[i] * r[j] * product_except(r, &[i, j], 2);
                }
            }
            Ok(std::f64::consts::PI.powi(n as i32 - 1) * (singles + 2.0 * pairs))
        }
        _ => Err(Error::Unsupported(format!(
            "no special closed form for n = {n}, d = {d}"
        ))),
    }
}

fn product_except(r: &[f64], skip: &[usize], power: i32) -> f64 {
    r.iter()
        .enumerate()
        .filter(|(i, _)| !skip.contains(i))
        .map(|(_, x)| x.powi(power))
        .product()
}
