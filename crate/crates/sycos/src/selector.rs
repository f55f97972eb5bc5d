//! Automatic choice between the two searches: run both on a few sampled
//! partitions, then score each by runtime and by the window shapes it is
//! built for (large windows favor top-down, small ones bottom-up).

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bu::run_bu;
use crate::error::{Error, Result};
use crate::td::{run_td, LayerSchedule};
use crate::types::{
    CorrelatedWindow, MethodTag, SearchOptions, SearchParams, TimeSeriesPair, Window,
};

/// Aggregated trial measurements over the sampled partitions.
#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Serialize)]
pub struct TrialStats {
    pub avg_runtime_td: f64,
    pub avg_runtime_bu: f64,
    pub n_large_td: usize,
    pub n_small_bu: usize,
    /// Recorded for diagnostics; the scores never use these two.
    pub n_small_td: usize,
    pub n_large_bu: usize,
}

/// Raw measurements for one sampled partition.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PartitionTrial {
    pub partition: Window,
    pub runtime_td: f64,
    pub runtime_bu: f64,
    pub windows_td: usize,
    pub windows_bu: usize,
}

/// The scored outcome; `chosen` is TD only on a strictly greater score.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SelectionReport {
    pub nscore_td: f64,
    pub nscore_bu: f64,
    pub chosen: MethodTag,
    pub stats: TrialStats,
    pub trials: Vec<PartitionTrial>,
    pub alpha: f64,
    pub rho: f64,
    /// True when no trial produced any window, forcing an even split.
    pub degenerate_split: bool,
}

/// Splits `[0, n_total)` into `big_m` equal partitions of `n_total / big_m`
/// samples and picks `m` of them uniformly without replacement.
pub fn sample_partitions(
    n_total: usize,
    big_m: usize,
    m: usize,
    s_min: usize,
    seed: u64,
) -> Result<Vec<Window>> {
    if m == 0 || m > big_m {
        return Err(Error::Config(format!("need 1 <= m <= M, got m={m}, M={big_m}")));
    }
    let len = n_total / big_m;
    if len < s_min {
        return Err(Error::Config(format!(
            "partitions of {len} samples cannot host windows of at least {s_min}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices: Vec<usize> = (0..big_m).collect();
    indices.shuffle(&mut rng);
    let mut picked: Vec<usize> = indices.into_iter().take(m).collect();
    picked.sort_unstable();
    Ok(picked.into_iter().map(|i| Window::new(i * len, (i + 1) * len)).collect())
}

/// Partitions windows into (small, large) by the cut `rho * s_max`;
/// exactly at the cut counts as small.
pub fn classify_windows(
    windows: &[CorrelatedWindow],
    rho: f64,
    s_max: usize,
) -> (usize, usize) {
    let cut = rho * s_max as f64;
    let small = windows.iter().filter(|w| w.window.size() as f64 <= cut).count();
    (small, windows.len() - small)
}

/// Normalized efficiency scores from the aggregated trials.
///
/// Runtimes are normalized to fractions of their sum, so the runtime term
/// `1/t̃` rewards the faster method. The window term is the method's share of
/// the windows it is shaped for: large ones for TD, small ones for BU.
pub fn compute_scores(stats: TrialStats, alpha: f64, rho: f64) -> SelectionReport {
    let t_sum = stats.avg_runtime_td + stats.avg_runtime_bu;
    let t_td = if t_sum > 0.0 { stats.avg_runtime_td / t_sum } else { 0.5 };
    let t_bu = if t_sum > 0.0 { stats.avg_runtime_bu / t_sum } else { 0.5 };
    let w_sum = stats.n_large_td + stats.n_small_bu;
    let degenerate = w_sum == 0;
    let (n_td, n_bu) = if degenerate {
        (0.5, 0.5)
    } else {
        (stats.n_large_td as f64 / w_sum as f64, stats.n_small_bu as f64 / w_sum as f64)
    };
    let nscore_td = alpha * (1.0 / t_td) + (1.0 - alpha) * n_td;
    let nscore_bu = alpha * (1.0 / t_bu) + (1.0 - alpha) * n_bu;
    let chosen = if nscore_td > nscore_bu { MethodTag::TD } else { MethodTag::BU };
    SelectionReport {
        nscore_td,
        nscore_bu,
        chosen,
        stats,
        trials: Vec::new(),
        alpha,
        rho,
        degenerate_split: degenerate,
    }
}

/// Runs both searches on `m` sampled partitions and scores them. The caller
/// dispatches the chosen method over the full series.
pub fn select(pair: &TimeSeriesPair, params: &SearchParams) -> Result<SelectionReport> {
    params.validate(pair.len())?;
    let partitions =
        sample_partitions(pair.len(), params.big_m, params.m, params.s_min, params.seed)?;
    let options = SearchOptions::default();
    let mut trials = Vec::with_capacity(partitions.len());
    let mut stats = TrialStats::default();

    for &part in &partitions {
        let slice = pair.slice(part)?;
        let mut local = *params;
        local.s_max = params.s_max.min(part.size());
        let schedule = LayerSchedule::geometric(local.s_max, local.s_min)?;

        let t0 = Instant::now();
        let (res_td, _) = run_td(&slice, &local, &schedule, options)?;
        let runtime_td = t0.elapsed().as_secs_f64();
        let t1 = Instant::now();
        let (res_bu, _) = run_bu(&slice, &local, options)?;
        let runtime_bu = t1.elapsed().as_secs_f64();

        // Window shares use the configured s_max, not the trial cap.
        let (s_td, l_td) = classify_windows(res_td.windows(), params.rho, params.s_max);
        let (s_bu, l_bu) = classify_windows(res_bu.windows(), params.rho, params.s_max);
        stats.n_small_td += s_td;
        stats.n_large_td += l_td;
        stats.n_small_bu += s_bu;
        stats.n_large_bu += l_bu;
        stats.avg_runtime_td += runtime_td;
        stats.avg_runtime_bu += runtime_bu;
        trials.push(PartitionTrial {
            partition: part,
            runtime_td,
            runtime_bu,
            windows_td: res_td.len(),
            windows_bu: res_bu.len(),
        });
    }
    let m = partitions.len() as f64;
    stats.avg_runtime_td /= m;
    stats.avg_runtime_bu /= m;
    let mut report = compute_scores(stats, params.alpha, params.rho);
    report.trials = trials;
    Ok(report)
}
