//! k-NN mutual-information estimation over a window, plus joint entropy and
//! normalized MI.
//!
//! Distances use the maximum norm. For each point the k-th neighbor defines
//! per-dimension radii `d_x`, `d_y`; marginal counts use the closed
//! comparison `|x_j - x_i| <= d_x`. By default the counts are passed to the
//! digamma function as `n_x + 1` (the point itself included); the raw
//! convention is available through [`MarginalConvention`].
//!
//! The joint-entropy normalizer is the k-NN (Kozachenko-Leonenko style)
//! estimate built from the same k-th-neighbor distances, so MI and entropy
//! share one neighborhood machinery.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::TimeSeriesPair;

/// Entropy below this is treated as degenerate.
pub const ENTROPY_FLOOR: f64 = 1e-6;

/// How marginal counts enter the digamma terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MarginalConvention {
    /// psi(n_x + 1): the point itself is included. The Gaussian oracle
    /// converges under this convention.
    #[default]
    IncludeSelf,
    /// psi(n_x) exactly as counted, without the +1.
    Raw,
}

/// One MI estimate with its normalizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MiEstimate {
    /// Raw MI in nats, clamped below at 0.
    pub mi_nats: f64,
    /// Joint entropy of the per-axis standardized window, in nats. Units-free
    /// normalizer; may still go negative for near-deterministic relations.
    pub entropy_nats: f64,
    /// mi / entropy clamped into [0, 1]; see [`MiEstimate::degenerate`].
    pub normalized: f64,
    pub n: usize,
    pub k: usize,
    /// True when the entropy normalizer fell below the floor. In that case
    /// `normalized` is 1 if the MI is positive and 0 otherwise.
    pub degenerate: bool,
}

/// Digamma function, accurate to <= 1e-10 absolute for x >= 1.
///
/// Uses the recurrence psi(x + 1) = psi(x) + 1/x to push the argument above
/// 6, then the asymptotic series.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("digamma requires x > 0, got {x}")));
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 6.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // B_2n / (2n x^{2n}) terms of the asymptotic expansion.
    let series = inv2
        * (1.0 / 12.0
            - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 / 132.0))));
    Ok(acc + x.ln() - 0.5 * inv - series)
}

/// Per-point neighborhood summary from one scratch pass.
struct NeighborPass {
    /// Max-norm distance to the k-th neighbor, per point.
    kth_dist: Vec<f64>,
    /// Marginal counts (excluding the point itself), per point.
    nx: Vec<usize>,
    ny: Vec<usize>,
}

/// Brute-force k-NN pass: exact, independent of the box-assisted structure.
fn neighbor_pass(xs: &[f64], ys: &[f64], k: usize) -> NeighborPass {
    let n = xs.len();
    let mut kth_dist = Vec::with_capacity(n);
    let mut dx_all = Vec::with_capacity(n);
    let mut dy_all = Vec::with_capacity(n);

    // (distance, id) keeps tie handling identical to the incremental path.
    let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
    for i in 0..n {
        best.clear();
        let (xi, yi) = (xs[i], ys[i]);
        for j in 0..n {
            if j == i {
                continue;
            }
            let d = (xs[j] - xi).abs().max((ys[j] - yi).abs());
            if best.len() < k || (d, j) < best[best.len() - 1] {
                let pos = best.partition_point(|&b| b < (d, j));
                best.insert(pos, (d, j));
                if best.len() > k {
                    best.pop();
                }
            }
        }
        let mut dx = 0.0f64;
        let mut dy = 0.0f64;
        for &(_, j) in &best {
            dx = dx.max((xs[j] - xi).abs());
            dy = dy.max((ys[j] - yi).abs());
        }
        kth_dist.push(best.last().map(|b| b.0).unwrap_or(0.0));
        dx_all.push(dx);
        dy_all.push(dy);
    }

    // Marginal counts via sorted projections: closed bounds on both ends.
    let mut sx = xs.to_vec();
    let mut sy = ys.to_vec();
    sx.sort_by(|a, b| a.total_cmp(b));
    sy.sort_by(|a, b| a.total_cmp(b));
    let count_in = |sorted: &[f64], center: f64, radius: f64| -> usize {
        let lo = sorted.partition_point(|&v| v < center - radius);
        let hi = sorted.partition_point(|&v| v <= center + radius);
        hi - lo - 1 // exclude the point itself
    };
    let nx = (0..n).map(|i| count_in(&sx, xs[i], dx_all[i])).collect();
    let ny = (0..n).map(|i| count_in(&sy, ys[i], dy_all[i])).collect();

    NeighborPass { kth_dist, nx, ny }
}

pub(crate) fn mi_from_counts(
    nx: &[usize],
    ny: &[usize],
    n: usize,
    k: usize,
    convention: MarginalConvention,
) -> f64 {
    let bump = match convention {
        MarginalConvention::IncludeSelf => 1,
        MarginalConvention::Raw => 0,
    };
    let mut psi_sum = 0.0;
    for i in 0..n {
        psi_sum += digamma((nx[i] + bump).max(1) as f64).unwrap()
            + digamma((ny[i] + bump).max(1) as f64).unwrap();
    }
    digamma(k as f64).unwrap() - 1.0 / k as f64 - psi_sum / n as f64 + digamma(n as f64).unwrap()
}

/// Joint-entropy estimate from the k-th-neighbor distances (max norm, 2D).
pub(crate) fn entropy_from_distances(kth_dist: &[f64], k: usize) -> f64 {
    let n = kth_dist.len();
    let sum_log: f64 = kth_dist.iter().map(|&d| d.max(1e-300).ln()).sum();
    digamma(n as f64).unwrap() - digamma(k as f64).unwrap()
        + (4.0f64).ln()
        + 2.0 * sum_log / n as f64
}

/// ln(σ_x · σ_y) of the window, with a floor against constant series.
///
/// Subtracting this from the joint entropy gives the entropy of the per-axis
/// standardized window — a units-free normalizer, so thresholds on
/// normalized MI mean the same thing regardless of the data's scale.
/// Summation order is fixed (window order, two passes) so the incremental
/// path reproduces it bit for bit.
pub(crate) fn log_std_product(xs: &[f64], ys: &[f64]) -> f64 {
    let log_std = |v: &[f64]| {
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        var.max(1e-300).sqrt().ln()
    };
    log_std(xs) + log_std(ys)
}

pub(crate) fn normalized_from(mi_raw: f64, entropy: f64) -> (f64, f64, bool) {
    let mi = mi_raw.max(0.0);
    if entropy <= ENTROPY_FLOOR {
        let normalized = if mi > ENTROPY_FLOOR { 1.0 } else { 0.0 };
        (mi, normalized, true)
    } else {
        (mi, (mi / entropy).clamp(0.0, 1.0), false)
    }
}

fn check_samples(n: usize, k: usize) -> Result<()> {
    if n <= k {
        return Err(Error::InsufficientSamples { n, k });
    }
    Ok(())
}

/// KSG MI estimate under the default (+1) marginal convention.
pub fn estimate_mi(pair_slice: &TimeSeriesPair, k: usize) -> Result<MiEstimate> {
    estimate_mi_with(pair_slice, k, MarginalConvention::IncludeSelf)
}

pub fn estimate_mi_with(
    pair_slice: &TimeSeriesPair,
    k: usize,
    convention: MarginalConvention,
) -> Result<MiEstimate> {
    let n = pair_slice.len();
    check_samples(n, k)?;
    let pass = neighbor_pass(pair_slice.xs(), pair_slice.ys(), k);
    let mi_raw = mi_from_counts(&pass.nx, &pass.ny, n, k, convention);
    let entropy = entropy_from_distances(&pass.kth_dist, k)
        - log_std_product(pair_slice.xs(), pair_slice.ys());
    let (mi, normalized, degenerate) = normalized_from(mi_raw, entropy);
    Ok(MiEstimate { mi_nats: mi, entropy_nats: entropy, normalized, n, k, degenerate })
}

/// Joint entropy of the window in nats (k = 4 neighborhood, capped at n - 1).
pub fn estimate_entropy(pair_slice: &TimeSeriesPair) -> Result<f64> {
    let n = pair_slice.len();
    if n < 2 {
        return Err(Error::InsufficientSamples { n, k: 1 });
    }
    let k = 4.min(n - 1);
    let pass = neighbor_pass(pair_slice.xs(), pair_slice.ys(), k);
    Ok(entropy_from_distances(&pass.kth_dist, k))
}

/// MI, entropy and normalized MI in one pass.
pub fn normalized_mi(pair_slice: &TimeSeriesPair, k: usize) -> Result<MiEstimate> {
    estimate_mi(pair_slice, k)
}
