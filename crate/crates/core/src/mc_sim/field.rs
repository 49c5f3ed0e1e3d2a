//! Sampling of the centred Gaussian field with covariance `exp(-|s - t|² / 2)`.
//!
//! Up to [`DENSE_LIMIT`] points the covariance matrix is factored by a pivoted
//! Cholesky decomposition that stops once every residual diagonal is at most
//! [`FACTOR_TOLERANCE`]; the neglected part is positive semidefinite, so every
//! covariance entry is reproduced to that tolerance. The kernel is numerically
//! low rank on fine grids, which also makes each draw cheap.
//!
//! Larger Cartesian grids in one or two dimensions use spectral synthesis on a
//! midpoint frequency lattice with cutoff [`SPECTRAL_CUTOFF`] and
//! [`SPECTRAL_MODES`] modes per axis.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimate::stream_rng;

pub const DENSE_LIMIT: usize = 3000;
pub const FACTOR_TOLERANCE: f64 = 1e-10;
pub const SPECTRAL_CUTOFF: f64 = 8.0;
pub const SPECTRAL_MODES: usize = 2048;
/// Largest admissible extent of the grid along any axis.
pub const MAX_EXTENT: f64 = 100.0;

/// Stationary, unit-variance field with squared-exponential covariance;
/// its gradient covariance is the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FieldModel {
    d: usize,
}

impl FieldModel {
    pub fn squared_exponential(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::domain("field dimension must be at least 1"));
        }
        Ok(FieldModel { d })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn covariance(&self, s: &[f64], t: &[f64]) -> f64 {
        let r2: f64 = s.iter().zip(t).map(|(a, b)| (a - b) * (a - b)).sum();
        (-0.5 * r2).exp()
    }
}

/// Points at which the field is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldGrid {
    /// Arbitrary points, each of the model's dimension.
    Points(Vec<Vec<f64>>),
    /// Tensor product of per-axis coordinates; the first axis varies slowest.
    Cartesian(Vec<Vec<f64>>),
}

impl FieldGrid {
    pub fn dim(&self) -> usize {
        match self {
            FieldGrid::Points(p) => p.first().map_or(0, Vec::len),
            FieldGrid::Cartesian(axes) => axes.len(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            FieldGrid::Points(p) => p.len(),
            FieldGrid::Cartesian(axes) => axes.iter().map(Vec::len).product(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All points, row-major over the Cartesian axes.
    pub fn points(&self) -> Vec<Vec<f64>> {
        match self {
            FieldGrid::Points(p) => p.clone(),
            FieldGrid::Cartesian(axes) => {
                let mut out = vec![Vec::with_capacity(axes.len())];
                for axis in axes {
                    out = out
                        .into_iter()
                        .flat_map(|prefix| {
                            axis.iter().map(move |&x| {
                                let mut p = prefix.clone();
                                p.push(x);
                                p
                            })
                        })
                        .collect();
                }
                out
            }
        }
    }

    fn extents(&self) -> Vec<f64> {
        let d = self.dim();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        let mut visit = |a: usize, x: f64| {
            lo[a] = lo[a].min(x);
            hi[a] = hi[a].max(x);
        };
        match self {
            FieldGrid::Points(p) => p.iter().for_each(|q| q.iter().enumerate().for_each(|(a, &x)| visit(a, x))),
            FieldGrid::Cartesian(axes) => axes
                .iter()
                .enumerate()
                .for_each(|(a, xs)| xs.iter().for_each(|&x| visit(a, x))),
        }
        lo.iter().zip(&hi).map(|(l, h)| h - l).collect()
    }
}

/// Reusable sampler for one model and grid.
#[derive(Debug, Clone)]
pub struct FieldSampler {
    len: usize,
    method: Method,
}

#[derive(Debug, Clone)]
enum Method {
    Dense(LowRankFactor),
    Spectral(SpectralSynthesis),
}

impl FieldSampler {
    pub fn new(model: &FieldModel, grid: &FieldGrid) -> Result<Self> {
        let d = model.d();
        if grid.is_empty() {
            return Err(Error::domain("grid has no points"));
        }
        if grid.dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "grid dimension {} does not match model dimension {d}",
                grid.dim()
            )));
        }
        if let FieldGrid::Points(p) = grid {
            if p.iter().any(|q| q.len() != d) {
                return Err(Error::DimensionMismatch("grid points differ in dimension".into()));
            }
        }
        if grid.extents().iter().any(|&e| !(e <= MAX_EXTENT)) {
            return Err(Error::size(format!("grid extends beyond a box of side {MAX_EXTENT}")));
        }
        let len = grid.len();
        let method = if len <= DENSE_LIMIT {
            Method::Dense(LowRankFactor::new(model, &grid.points()))
        } else {
            match grid {
                FieldGrid::Cartesian(axes) if d <= 2 => Method::Spectral(SpectralSynthesis::new(axes)),
                _ => {
                    return Err(Error::size(format!(
                        "{len} points exceed the dense limit {DENSE_LIMIT}; spectral synthesis needs a Cartesian grid in d <= 2"
                    )))
                }
            }
        };
        Ok(FieldSampler { len, method })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn method_name(&self) -> &'static str {
        match self.method {
            Method::Dense(_) => "dense",
            Method::Spectral(_) => "spectral",
        }
    }

    /// Rank of the dense factor, if that path is used.
    pub fn rank(&self) -> Option<usize> {
        match &self.method {
            Method::Dense(f) => Some(f.rank),
            Method::Spectral(_) => None,
        }
    }

    /// Covariance between grid points `i` and `j` implied by the sampler.
    pub fn implied_covariance(&self, i: usize, j: usize) -> f64 {
        match &self.method {
            Method::Dense(f) => f.entry(i, j),
            Method::Spectral(s) => s.entry(i, j),
        }
    }

    /// Writes one realisation into `out` (length [`FieldSampler::len`]).
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        assert_eq!(out.len(), self.len);
        match &self.method {
            Method::Dense(f) => f.sample_into(rng, out),
            Method::Spectral(s) => s.sample_into(rng, out),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut out = vec![0.0; self.len];
        self.sample_into(rng, &mut out);
        out
    }
}

/// One realisation of the field on `grid`, reproducible from `seed`.
pub fn sample_field(model: &FieldModel, grid: &FieldGrid, seed: u64) -> Result<Vec<f64>> {
    let sampler = FieldSampler::new(model, grid)?;
    Ok(sampler.sample(&mut stream_rng(seed, 0)))
}

/// `K ≈ L L^T` with `L` stored column by column.
#[derive(Debug, Clone)]
struct LowRankFactor {
    len: usize,
    rank: usize,
    columns: Vec<f64>,
}

impl LowRankFactor {
    fn new(model: &FieldModel, points: &[Vec<f64>]) -> Self {
        let len = points.len();
        let mut residual = vec![1.0_f64; len];
        let mut columns: Vec<f64> = Vec::new();
        let mut rank = 0;
        while rank < len {
            let (pivot, &largest) = residual
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .expect("non-empty grid");
            if largest <= FACTOR_TOLERANCE {
                break;
            }
            let scale = largest.sqrt();
            let mut col: Vec<f64> = points.iter().map(|p| model.covariance(p, &points[pivot])).collect();
            for k in 0..rank {
                let prev = &columns[k * len..(k + 1) * len];
                let lp = prev[pivot];
                if lp != 0.0 {
                    col.iter_mut().zip(prev).for_each(|(c, l)| *c -= l * lp);
                }
            }
            col.iter_mut().for_each(|c| *c /= scale);
            col[pivot] = scale;
            for (r, c) in residual.iter_mut().zip(&col) {
                *r -= c * c;
            }
            residual[pivot] = 0.0;
            columns.extend_from_slice(&col);
            rank += 1;
        }
        LowRankFactor { len, rank, columns }
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        (0..self.rank)
            .map(|k| self.columns[k * self.len + i] * self.columns[k * self.len + j])
            .sum()
    }

    fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        out.fill(0.0);
        for col in self.columns.chunks_exact(self.len) {
            let z: f64 = rng.sample(StandardNormal);
            out.iter_mut().zip(col).for_each(|(o, c)| *o += z * c);
        }
    }
}

/// Frequencies and weights of the positive half of the midpoint lattice on
/// `[-Ω, Ω]`; each weight is doubled to account for the mirrored half.
fn half_lattice() -> (Vec<f64>, Vec<f64>) {
    let step = 2.0 * SPECTRAL_CUTOFF / SPECTRAL_MODES as f64;
    let density = |w: f64| (-0.5 * w * w).exp() / (2.0 * std::f64::consts::PI).sqrt();
    (SPECTRAL_MODES / 2..SPECTRAL_MODES)
        .map(|k| {
            let w = -SPECTRAL_CUTOFF + (k as f64 + 0.5) * step;
            (w, 2.0 * density(w) * step)
        })
        .unzip()
}

/// Full symmetric midpoint lattice on `[-Ω, Ω]`.
fn full_lattice() -> (Vec<f64>, Vec<f64>) {
    let step = 2.0 * SPECTRAL_CUTOFF / SPECTRAL_MODES as f64;
    let density = |w: f64| (-0.5 * w * w).exp() / (2.0 * std::f64::consts::PI).sqrt();
    (0..SPECTRAL_MODES)
        .map(|k| {
            let w = -SPECTRAL_CUTOFF + (k as f64 + 0.5) * step;
            (w, density(w) * step)
        })
        .unzip()
}

/// Covariance at lag `tau` of the one-dimensional spectral synthesis, i.e. the
/// lattice quadrature of `∫ cos(ω τ) φ(ω) dω`. In higher dimensions the
/// synthesised covariance is the product of this over the axes.
pub fn spectral_lattice_covariance(tau: f64) -> f64 {
    let (freqs, weights) = half_lattice();
    freqs.iter().zip(&weights).map(|(w, a)| a * (w * tau).cos()).sum()
}

#[derive(Debug, Clone)]
struct SpectralSynthesis {
    axes: Vec<Vec<f64>>,
}

impl SpectralSynthesis {
    fn new(axes: &[Vec<f64>]) -> Self {
        SpectralSynthesis { axes: axes.to_vec() }
    }

    fn coords(&self, i: usize) -> Vec<f64> {
        let mut rem = i;
        let mut c = vec![0.0; self.axes.len()];
        for (a, axis) in self.axes.iter().enumerate().rev() {
            c[a] = axis[rem % axis.len()];
            rem /= axis.len();
        }
        c
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        let (ci, cj) = (self.coords(i), self.coords(j));
        ci.iter().zip(&cj).map(|(a, b)| spectral_lattice_covariance(a - b)).product()
    }

    fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match self.axes.len() {
            1 => self.sample_line(rng, out),
            2 => self.sample_plane(rng, out),
            _ => unreachable!("spectral path is limited to d <= 2"),
        }
    }

    fn sample_line<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let (freqs, weights) = half_lattice();
        let coeffs: Vec<(f64, f64)> = weights
            .iter()
            .map(|w| {
                let s = w.sqrt();
                (s * rng.sample::<f64, _>(StandardNormal), s * rng.sample::<f64, _>(StandardNormal))
            })
            .collect();
        for (o, &t) in out.iter_mut().zip(&self.axes[0]) {
            *o = freqs
                .iter()
                .zip(&coeffs)
                .map(|(w, (a, b))| {
                    let (s, c) = (w * t).sin_cos();
                    a * c + b * s
                })
                .sum();
        }
    }

    /// Half lattice along the first axis, full lattice along the second:
    /// `X = C1 P + S1 Q` with `P = A C2^T + B S2^T`, `Q = B C2^T - A S2^T`.
    fn sample_plane<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let (f1, w1) = half_lattice();
        let (f2, w2) = full_lattice();
        let (t1, t2) = (&self.axes[0], &self.axes[1]);
        let (m1, m2, n2) = (f1.len(), f2.len(), t2.len());

        let table = |freqs: &[f64], ts: &[f64]| -> (Vec<f64>, Vec<f64>) {
            let mut c = Vec::with_capacity(ts.len() * freqs.len());
            let mut s = Vec::with_capacity(ts.len() * freqs.len());
            for &t in ts {
                for &w in freqs {
                    let (sn, cs) = (w * t).sin_cos();
                    c.push(cs);
                    s.push(sn);
                }
            }
            (c, s)
        };
        let (c2, s2) = table(&f2, t2);

        let mut p = vec![0.0; m1 * n2];
        let mut q = vec![0.0; m1 * n2];
        let mut a_row = vec![0.0; m2];
        let mut b_row = vec![0.0; m2];
        for k1 in 0..m1 {
            for k2 in 0..m2 {
                let s = (w1[k1] * w2[k2]).sqrt();
                a_row[k2] = s * rng.sample::<f64, _>(StandardNormal);
                b_row[k2] = s * rng.sample::<f64, _>(StandardNormal);
            }
            for j2 in 0..n2 {
                let (cr, sr) = (&c2[j2 * m2..(j2 + 1) * m2], &s2[j2 * m2..(j2 + 1) * m2]);
                let mut pv = 0.0;
                let mut qv = 0.0;
                for k2 in 0..m2 {
                    pv += a_row[k2] * cr[k2] + b_row[k2] * sr[k2];
                    qv += b_row[k2] * cr[k2] - a_row[k2] * sr[k2];
                }
                p[k1 * n2 + j2] = pv;
                q[k1 * n2 + j2] = qv;
            }
        }
        out.fill(0.0);
        for (j1, &t) in t1.iter().enumerate() {
            let row = &mut out[j1 * n2..(j1 + 1) * n2];
            for k1 in 0..m1 {
                let (s, c) = (f1[k1] * t).sin_cos();
                let (pr, qr) = (&p[k1 * n2..(k1 + 1) * n2], &q[k1 * n2..(k1 + 1) * n2]);
                for j2 in 0..n2 {
                    row[j2] += c * pr[j2] + s * qr[j2];
                }
            }
        }
    }
}
