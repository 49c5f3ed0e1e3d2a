use crate::error::{Error, Result};

/// Maximum constraint violation accepted as "inside every ball".
pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;
/// Cyclic projection sweeps before declaring the balls disjoint.
pub const FEASIBILITY_SWEEPS: usize = 500;

/// Whether the closed balls `B(centers[i], radii[i])` have a common point.
///
/// Exact for `d = 1` and for two balls. Otherwise runs cyclic projections onto
/// the balls from the centroid of the centres and accepts once the largest
/// violation `|y - t_i| - r_i` drops below [`FEASIBILITY_TOLERANCE`]. Thin
/// intersections can take far more than [`FEASIBILITY_SWEEPS`] sweeps to
/// reach the tolerance, so an exhausted budget is settled by an exact
/// minimax test instead of being reported as disjoint.
pub fn balls_intersect(centers: &[Vec<f64>], radii: &[f64]) -> Result<bool> {
    if centers.is_empty() || centers.len() != radii.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} centres and {} radii",
            centers.len(),
            radii.len()
        )));
    }
    let d = centers[0].len();
    if d == 0 || centers.iter().any(|c| c.len() != d) {
        return Err(Error::DimensionMismatch(
            "all centres must share one positive dimension".into(),
        ));
    }
    let flat: Vec<f64> = centers.iter().flatten().copied().collect();
    let mut scratch = vec![0.0; d];
    Ok(intersect_flat(&flat, d, radii, &mut scratch))
}

/// Same test on centres stored row-major in `centers` (`n * d` values).
/// `scratch` must hold `d` values.
pub(crate) fn intersect_flat(centers: &[f64], d: usize, radii: &[f64], scratch: &mut [f64]) -> bool {
    let n = radii.len();
    let center = |i: usize| &centers[i * d..(i + 1) * d];

    if d == 1 {
        let lo = (0..n).map(|i| centers[i] - radii[i]).fold(f64::NEG_INFINITY, f64::max);
        let hi = (0..n).map(|i| centers[i] + radii[i]).fold(f64::INFINITY, f64::min);
        return lo <= hi;
    }

    // pairwise condition is necessary, and sufficient for n = 2
    for i in 0..n {
        for j in i + 1..n {
            if dist2(center(i), center(j)) > (radii[i] + radii[j]).powi(2) {
                return false;
            }
        }
    }
    if n <= 2 {
        return true;
    }

    let y = scratch;
    y.fill(0.0);
    for i in 0..n {
        for (yk, ck) in y.iter_mut().zip(center(i)) {
            *yk += ck;
        }
    }
    y.iter_mut().for_each(|v| *v /= n as f64);

    if max_violation(y, centers, d, radii) <= FEASIBILITY_TOLERANCE {
        return true;
    }
    for _ in 0..FEASIBILITY_SWEEPS {
        let mut moved = 0.0f64;
        for (i, &r) in radii.iter().enumerate() {
            let c = center(i);
            let dist = dist2(y, c).sqrt();
            if dist > r {
                let shrink = r / dist;
                for (yk, ck) in y.iter_mut().zip(c) {
                    let next = ck + (*yk - ck) * shrink;
                    moved = moved.max((next - *yk).abs());
                    *yk = next;
                }
            }
        }
        if max_violation(y, centers, d, radii) <= FEASIBILITY_TOLERANCE {
            return true;
        }
        // a fixed point of the sweep outside some ball means the balls are disjoint
        if moved <= 1e-15 {
            return false;
        }
    }
    min_max_power(centers, d, radii) <= 1e-12 * radii.iter().fold(0.0f64, |m, r| m.max(r * r))
}

/// `min_y max_i (|y - t_i|^2 - r_i^2)`, which is non-positive exactly when
/// the balls share a point.
///
/// The objective is strictly convex; at its minimiser `y = Σ λ_i t_i` over an
/// affinely independent active set of at most `d + 1` centres, all of which
/// have equal power. Every such subset yields one candidate point, and the
/// smallest objective over the candidates is the minimum.
fn min_max_power(centers: &[f64], d: usize, radii: &[f64]) -> f64 {
    let n = radii.len();
    let center = |i: usize| &centers[i * d..(i + 1) * d];
    let objective = |y: &[f64]| {
        (0..n)
            .map(|i| dist2(y, center(i)) - radii[i] * radii[i])
            .fold(f64::NEG_INFINITY, f64::max)
    };

    let mut best = f64::INFINITY;
    let mut y = vec![0.0; d];
    let max_size = n.min(d + 1);
    for mask in 1u32..(1u32 << n) {
        let size = mask.count_ones() as usize;
        if size > max_size {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let c0 = center(members[0]);
        let m = size - 1;
        // Gram system for y = c0 + Σ α_k e_k with equal power at every member
        let edges: Vec<Vec<f64>> = members[1..]
            .iter()
            .map(|&k| center(k).iter().zip(c0).map(|(a, b)| a - b).collect())
            .collect();
        let mut a = vec![0.0; m * (m + 1)];
        for (k, &mk) in members[1..].iter().enumerate() {
            let ck = center(mk);
            for l in 0..m {
                a[k * (m + 1) + l] = dot(&edges[k], &edges[l]);
            }
            let rhs = (dot(ck, ck) - dot(c0, c0) - radii[mk] * radii[mk]
                + radii[members[0]] * radii[members[0]])
                / 2.0;
            a[k * (m + 1) + m] = rhs - dot(c0, &edges[k]);
        }
        let Some(alpha) = solve_augmented(&mut a, m) else {
            continue;
        };
        y.copy_from_slice(c0);
        for (e, al) in edges.iter().zip(&alpha) {
            y.iter_mut().zip(e).for_each(|(yk, ek)| *yk += al * ek);
        }
        best = best.min(objective(&y));
    }
    best
}

/// Gaussian elimination with partial pivoting on an `m x (m + 1)` augmented
/// matrix; `None` when the system is (numerically) singular.
fn solve_augmented(a: &mut [f64], m: usize) -> Option<Vec<f64>> {
    let w = m + 1;
    let scale = a.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(1.0);
    for col in 0..m {
        let pivot = (col..m).max_by(|&i, &j| a[i * w + col].abs().total_cmp(&a[j * w + col].abs()))?;
        if a[pivot * w + col].abs() <= 1e-12 * scale {
            return None;
        }
        if pivot != col {
            for k in 0..w {
                a.swap(pivot * w + k, col * w + k);
            }
        }
        for row in col + 1..m {
            let f = a[row * w + col] / a[col * w + col];
            for k in col..w {
                a[row * w + k] -= f * a[col * w + k];
            }
        }
    }
    let mut x = vec![0.0; m];
    for row in (0..m).rev() {
        let tail: f64 = (row + 1..m).map(|k| a[row * w + k] * x[k]).sum();
        x[row] = (a[row * w + m] - tail) / a[row * w + row];
    }
    Some(x)
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_violation(y: &[f64], centers: &[f64], d: usize, radii: &[f64]) -> f64 {
    radii
        .iter()
        .enumerate()
        .map(|(i, r)| dist2(y, &centers[i * d..(i + 1) * d]).sqrt() - r)
        .fold(f64::NEG_INFINITY, f64::max)
}

#[inline]
fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
