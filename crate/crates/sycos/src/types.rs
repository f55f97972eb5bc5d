//! Domain vocabulary shared by all modules: series, windows, result sets,
//! search parameters.
//!
//! Windows are half-open `[start, end)` index intervals. All types here are
//! immutable value types and safe to copy across workers.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two equal-length value sequences sharing one time axis.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesPair {
    x_values: Vec<f64>,
    y_values: Vec<f64>,
    /// Epoch (or index origin) of the first sample. Informational.
    pub start_time: i64,
    /// Duration per sample in the caller's unit. Informational.
    pub step: f64,
}

impl TimeSeriesPair {
    /// Builds a pair, validating equal lengths (>= 2) and finiteness.
    pub fn new(x_values: Vec<f64>, y_values: Vec<f64>) -> Result<Self> {
        Self::with_time(x_values, y_values, 0, 1.0)
    }

    pub fn with_time(
        x_values: Vec<f64>,
        y_values: Vec<f64>,
        start_time: i64,
        step: f64,
    ) -> Result<Self> {
        if x_values.len() != y_values.len() {
            return Err(Error::Config(format!(
                "series lengths differ: {} vs {}",
                x_values.len(),
                y_values.len()
            )));
        }
        if x_values.len() < 2 {
            return Err(Error::Config("series must hold at least 2 samples".into()));
        }
        if step <= 0.0 {
            return Err(Error::Config("step must be positive".into()));
        }
        if x_values.iter().chain(y_values.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Config("series contain non-finite values".into()));
        }
        Ok(Self { x_values, y_values, start_time, step })
    }

    pub fn len(&self) -> usize {
        self.x_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x_values.is_empty()
    }

    pub fn xs(&self) -> &[f64] {
        &self.x_values
    }

    pub fn ys(&self) -> &[f64] {
        &self.y_values
    }

    pub fn point(&self, i: usize) -> (f64, f64) {
        (self.x_values[i], self.y_values[i])
    }

    /// Adds deterministic de-tie jitter of magnitude 1e-10 x value-range,
    /// keyed to `seed`. Identical series stay estimable afterwards.
    pub fn apply_jitter(&mut self, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x4a49_5454_4552_u64);
        for values in [&mut self.x_values, &mut self.y_values] {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &v in values.iter() {
                lo = lo.min(v);
                hi = hi.max(v);
            }
            let range = if hi > lo { hi - lo } else { 1.0 };
            let amp = 1e-10 * range;
            for v in values.iter_mut() {
                *v += amp * (rng.gen::<f64>() - 0.5);
            }
        }
    }

    /// Returns the sub-pair covered by `w`.
    pub fn slice(&self, w: Window) -> Result<TimeSeriesPair> {
        w.check_against(self.len())?;
        Ok(TimeSeriesPair {
            x_values: self.x_values[w.start..w.end].to_vec(),
            y_values: self.y_values[w.start..w.end].to_vec(),
            start_time: self.start_time + w.start as i64,
            step: self.step,
        })
    }
}

/// Convenience wrapper matching the library's functional surface.
pub fn slice(pair: &TimeSeriesPair, w: Window) -> Result<TimeSeriesPair> {
    pair.slice(w)
}

/// Half-open index interval `[start, end)` over a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Window {
    pub start: usize,
    pub end: usize,
}

impl Window {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start < end, "window [{start}, {end}) is empty or inverted");
        Self { start, end }
    }

    pub fn size(&self) -> usize {
        self.end - self.start
    }

    pub fn contains(&self, idx: usize) -> bool {
        idx >= self.start && idx < self.end
    }

    pub fn overlaps(&self, other: &Window) -> bool {
        self.start < other.end && other.start < self.end
    }

    /// Intersection, if non-empty.
    pub fn intersect(&self, other: &Window) -> Option<Window> {
        let s = self.start.max(other.start);
        let e = self.end.min(other.end);
        (s < e).then(|| Window::new(s, e))
    }

    pub fn check_against(&self, len: usize) -> Result<()> {
        if self.start >= self.end || self.end > len {
            return Err(Error::WindowOutOfBounds { start: self.start, end: self.end, len });
        }
        Ok(())
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.start, self.end)
    }
}

/// Which search produced a window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MethodTag {
    TD,
    BU,
}

impl fmt::Display for MethodTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MethodTag::TD => write!(f, "TD"),
            MethodTag::BU => write!(f, "BU"),
        }
    }
}

/// An accepted window together with its raw and normalized MI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatedWindow {
    pub window: Window,
    /// Raw MI in nats, clamped at 0.
    pub mi: f64,
    /// MI over joint entropy, clamped into [0, 1].
    pub normalized_mi: f64,
    pub method_tag: MethodTag,
}

/// Pairwise-disjoint accepted windows, sorted ascending by start index.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultSet {
    windows: Vec<CorrelatedWindow>,
}

impl ResultSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `cw`, preserving sorted order. Rejects overlap, naming the
    /// conflicting member.
    pub fn insert_disjoint(&mut self, cw: CorrelatedWindow) -> Result<()> {
        if let Some(existing) = self.windows.iter().find(|m| m.window.overlaps(&cw.window)) {
            return Err(Error::OverlappingWindow {
                candidate: cw.window,
                existing: existing.window,
            });
        }
        let pos = self.windows.partition_point(|m| m.window.start < cw.window.start);
        self.windows.insert(pos, cw);
        Ok(())
    }

    pub fn windows(&self) -> &[CorrelatedWindow] {
        &self.windows
    }

    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, CorrelatedWindow> {
        self.windows.iter()
    }

    /// Total number of samples covered by the member windows.
    pub fn covered_samples(&self) -> usize {
        self.windows.iter().map(|w| w.window.size()).sum()
    }
}

impl IntoIterator for ResultSet {
    type Item = CorrelatedWindow;
    type IntoIter = std::vec::IntoIter<CorrelatedWindow>;
    fn into_iter(self) -> Self::IntoIter {
        self.windows.into_iter()
    }
}

/// All thresholds and step sizes for the searches and the selector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    /// Correlation threshold on normalized MI, in (0, 1].
    pub sigma: f64,
    /// Noise threshold ratio tau/sigma, in [0, 1).
    pub tau_ratio: f64,
    /// TD sliding step in samples; `None` = max(1, layer_size / 4).
    pub delta_td: Option<usize>,
    /// BU neighbor step in samples; `None` = max(1, s_min / 3).
    pub delta_bu: Option<usize>,
    pub s_min: usize,
    pub s_max: usize,
    /// Neighbor count for the MI estimator.
    pub k: usize,
    /// BU idle budget: tolerated consecutive non-improvements.
    pub t_max_idle: usize,
    /// LAHC history length.
    pub h: usize,
    /// Consecutive noise detections before pruning activates.
    pub p: usize,
    /// Runtime weight in the selection scores, in [0, 1].
    pub alpha: f64,
    /// Small/large window cut ratio, in (0, 1].
    pub rho: f64,
    /// Sampled partitions for selection.
    pub m: usize,
    /// Total partitions for selection.
    pub big_m: usize,
    pub seed: u64,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            sigma: 0.2,
            tau_ratio: 0.25,
            delta_td: None,
            delta_bu: None,
            s_min: 30,
            s_max: 500,
            k: 4,
            t_max_idle: 3,
            h: 5,
            p: 3,
            alpha: 0.5,
            rho: 0.5,
            m: 6,
            big_m: 20,
            seed: 0,
        }
    }
}

impl SearchParams {
    pub fn with_sizes(s_min: usize, s_max: usize) -> Self {
        Self { s_min, s_max, ..Self::default() }
    }

    /// Noise threshold tau = tau_ratio * sigma.
    pub fn tau(&self) -> f64 {
        self.tau_ratio * self.sigma
    }

    pub fn delta_td_for(&self, layer_size: usize) -> usize {
        self.delta_td.unwrap_or_else(|| (layer_size / 4).max(1))
    }

    pub fn delta_bu_value(&self) -> usize {
        self.delta_bu.unwrap_or_else(|| (self.s_min / 3).max(1))
    }

    /// Validates the parameter set against a series of length `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma <= 1.0) {
            return Err(Error::Config(format!("sigma must be in (0, 1], got {}", self.sigma)));
        }
        if !(0.0..1.0).contains(&self.tau_ratio) {
            return Err(Error::Config(format!(
                "tau_ratio must be in [0, 1), got {}",
                self.tau_ratio
            )));
        }
        if self.s_min < 2 || self.s_min > self.s_max || self.s_max > n {
            return Err(Error::Config(format!(
                "need 2 <= s_min <= s_max <= n, got s_min={}, s_max={}, n={}",
                self.s_min, self.s_max, n
            )));
        }
        if self.k == 0 || self.k >= self.s_min {
            return Err(Error::Config(format!(
                "need 0 < k < s_min, got k={}, s_min={}",
                self.k, self.s_min
            )));
        }
        if let Some(d) = self.delta_td {
            if d == 0 {
                return Err(Error::Config("delta_td must be >= 1".into()));
            }
        }
        if let Some(d) = self.delta_bu {
            if d == 0 {
                return Err(Error::Config("delta_bu must be >= 1".into()));
            }
        }
        if self.h == 0 {
            return Err(Error::Config("history length h must be >= 1".into()));
        }
        if self.p == 0 {
            return Err(Error::Config("noise streak p must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::Config(format!("alpha must be in [0, 1], got {}", self.alpha)));
        }
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(Error::Config(format!("rho must be in (0, 1], got {}", self.rho)));
        }
        Ok(())
    }
}

/// Per-run toggles for the optimizations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub noise_pruning: bool,
    pub incremental: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { noise_pruning: true, incremental: true }
    }
}

impl SearchOptions {
    /// No pruning, no incremental MI.
    pub fn origin() -> Self {
        Self { noise_pruning: false, incremental: false }
    }
}

/// Counters recorded while a search runs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub mi_evaluations: u64,
    pub knn_searches: u64,
    pub windows_visited: u64,
    pub prune_events: u64,
}

impl SearchStats {
    pub fn merge(&mut self, other: &SearchStats) {
        self.mi_evaluations += other.mi_evaluations;
        self.knn_searches += other.knn_searches;
        self.windows_visited += other.windows_visited;
        self.prune_events += other.prune_events;
    }
}
