//! Box-assisted k-NN structure with influenced-region bookkeeping, so the MI
//! of a shifted or extended window reuses prior work.
//!
//! Each live point keeps its k-th-neighbor distances and marginal counts.
//! The influenced region (IR) of a point is the max-norm ball of radius
//! `d = max(d_x, d_y)`: a point entering or leaving the IR forces a fresh
//! k-NN search. The influenced marginal regions (IMR) are the per-dimension
//! strips of half-width `d_x` / `d_y`: entering or leaving a strip only
//! bumps the corresponding marginal count. A mutation touching neither
//! changes nothing besides the global live count.
//!
//! `finalize` recomputes the digamma sums from the (exact, integer) counts,
//! so the result matches a scratch estimate whenever counts and distances
//! match.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::ksg::{
    entropy_from_distances, log_std_product, mi_from_counts, normalized_from, MarginalConvention,
    MiEstimate,
};
use crate::types::{TimeSeriesPair, Window};

/// Per-point neighbor and marginal bookkeeping.
#[derive(Debug, Clone, Copy)]
pub struct PointRecord {
    pub x: f64,
    pub y: f64,
    /// Max-norm distance to the k-th neighbor; IR half-width.
    pub knn_dist: f64,
    /// Per-dimension spans of the k nearest neighbors; IMR half-widths.
    pub d_x: f64,
    pub d_y: f64,
    /// Marginal counts, excluding the point itself.
    pub n_x: u32,
    pub n_y: u32,
    /// Neighbors actually found; below k the influenced region is unbounded.
    found: u32,
}

impl PointRecord {
    fn ir_contains_for(&self, x: f64, y: f64, k: usize) -> bool {
        self.found < k as u32
            || (x - self.x).abs().max((y - self.y).abs()) <= self.knn_dist
    }

    fn imr_x_contains(&self, x: f64) -> bool {
        (x - self.x).abs() <= self.d_x
    }

    fn imr_y_contains(&self, y: f64) -> bool {
        (y - self.y).abs() <= self.d_y
    }
}

/// Sparse uniform grid; cell coordinate = floor(coord / cell_size).
#[derive(Debug, Clone)]
struct BoxGrid {
    cell_size: f64,
    cells: HashMap<(i64, i64), Vec<(usize, f64, f64)>>,
    // Live-cell bounds, grown on insert only; a conservative ring-walk limit.
    min_cell: (i64, i64),
    max_cell: (i64, i64),
}

impl BoxGrid {
    fn new(cell_size: f64) -> Self {
        Self {
            cell_size,
            cells: HashMap::new(),
            min_cell: (i64::MAX, i64::MAX),
            max_cell: (i64::MIN, i64::MIN),
        }
    }

    fn cell_of(&self, x: f64, y: f64) -> (i64, i64) {
        ((x / self.cell_size).floor() as i64, (y / self.cell_size).floor() as i64)
    }

    fn insert(&mut self, id: usize, x: f64, y: f64) {
        let key = self.cell_of(x, y);
        self.min_cell = (self.min_cell.0.min(key.0), self.min_cell.1.min(key.1));
        self.max_cell = (self.max_cell.0.max(key.0), self.max_cell.1.max(key.1));
        self.cells.entry(key).or_default().push((id, x, y));
    }

    fn remove(&mut self, id: usize, x: f64, y: f64) {
        let key = self.cell_of(x, y);
        if let Some(list) = self.cells.get_mut(&key) {
            if let Some(pos) = list.iter().position(|&(p, _, _)| p == id) {
                list.swap_remove(pos);
            }
            if list.is_empty() {
                self.cells.remove(&key);
            }
        }
    }

    /// Largest Chebyshev cell distance from `(cx, cy)` to any live cell.
    fn max_ring(&self, cx: i64, cy: i64) -> i64 {
        if self.cells.is_empty() {
            return 0;
        }
        let dx = (cx - self.min_cell.0).abs().max((self.max_cell.0 - cx).abs());
        let dy = (cy - self.min_cell.1).abs().max((self.max_cell.1 - cy).abs());
        dx.max(dy)
    }
}

/// Sorted projection of one coordinate axis, for O(log n) marginal counts.
#[derive(Debug, Clone, Default)]
struct SortedAxis(Vec<f64>);

impl SortedAxis {
    fn insert(&mut self, v: f64) {
        let pos = self.0.partition_point(|&w| w < v);
        self.0.insert(pos, v);
    }

    fn remove(&mut self, v: f64) {
        let pos = self.0.partition_point(|&w| w < v);
        debug_assert!(self.0[pos] == v, "axis desync");
        self.0.remove(pos);
    }

    /// Count of live values in the closed interval, minus the point itself.
    fn count_around(&self, center: f64, radius: f64) -> u32 {
        let lo = self.0.partition_point(|&v| v < center - radius);
        let hi = self.0.partition_point(|&v| v <= center + radius);
        (hi - lo - 1) as u32
    }
}

/// Box grid plus per-point records enabling incremental MI maintenance.
#[derive(Debug, Clone)]
pub struct MiState {
    grid: BoxGrid,
    records: BTreeMap<usize, PointRecord>,
    axis_x: SortedAxis,
    axis_y: SortedAxis,
    k: usize,
    /// Window the state currently represents (global indices).
    window: Window,
    /// Live count at the last grid (re)build; drift > 2x triggers a rebuild.
    built_n: usize,
    /// Per-point k-NN searches performed since construction.
    knn_searches: u64,
    /// Debug-mode audit of IR/IMR consistency after every mutation.
    pub audit: bool,
}

impl MiState {
    /// Builds the state over `window` of `pair`. Point ids are the global
    /// sample indices.
    pub fn build(pair: &TimeSeriesPair, window: Window, k: usize) -> Result<Self> {
        window.check_against(pair.len())?;
        let n = window.size();
        if n <= k {
            return Err(Error::InsufficientSamples { n, k });
        }
        let mut state = Self {
            grid: BoxGrid::new(cell_size_for(pair, window, k)),
            records: BTreeMap::new(),
            axis_x: SortedAxis::default(),
            axis_y: SortedAxis::default(),
            k,
            window,
            built_n: n,
            knn_searches: 0,
            audit: false,
        };
        let mut xs: Vec<f64> = Vec::with_capacity(n);
        let mut ys: Vec<f64> = Vec::with_capacity(n);
        for i in window.start..window.end {
            let (x, y) = pair.point(i);
            state.grid.insert(i, x, y);
            xs.push(x);
            ys.push(y);
        }
        xs.sort_by(|a, b| a.total_cmp(b));
        ys.sort_by(|a, b| a.total_cmp(b));
        state.axis_x = SortedAxis(xs);
        state.axis_y = SortedAxis(ys);
        for i in window.start..window.end {
            let (x, y) = pair.point(i);
            let rec = state.survey_point(i, x, y);
            state.records.insert(i, rec);
        }
        Ok(state)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn knn_searches(&self) -> u64 {
        self.knn_searches
    }

    pub fn record(&self, id: usize) -> Option<&PointRecord> {
        self.records.get(&id)
    }

    /// Fresh k-NN search plus marginal recount for one point.
    fn survey_point(&mut self, id: usize, x: f64, y: f64) -> PointRecord {
        self.knn_searches += 1;
        let (knn_dist, d_x, d_y, found) = self.knn_search(id, x, y);
        let n_x = self.axis_x.count_around(x, d_x);
        let n_y = self.axis_y.count_around(y, d_y);
        PointRecord { x, y, knn_dist, d_x, d_y, n_x, n_y, found }
    }

    /// Expanding-ring k-NN over the grid. Ties broken by (distance, id) so
    /// the result matches the brute-force estimator exactly.
    fn knn_search(&self, id: usize, x: f64, y: f64) -> (f64, f64, f64, u32) {
        let k = self.k;
        let (cx, cy) = self.grid.cell_of(x, y);
        let max_ring = self.grid.max_ring(cx, cy);
        let mut best: Vec<(f64, usize, f64, f64)> = Vec::with_capacity(k + 1);

        for ring in 0..=max_ring {
            for (gx, gy) in ring_cells(cx, cy, ring) {
                if let Some(list) = self.grid.cells.get(&(gx, gy)) {
                    for &(j, jx, jy) in list {
                        if j == id {
                            continue;
                        }
                        let d = (jx - x).abs().max((jy - y).abs());
                        let last = best.last().map(|b| (b.0, b.1));
                        if best.len() < k || Some((d, j)) < last {
                            let pos = best.partition_point(|b| (b.0, b.1) < (d, j));
                            best.insert(pos, (d, j, jx, jy));
                            if best.len() > k {
                                best.pop();
                            }
                        }
                    }
                }
            }
            // Ring r+1 holds no point at max-norm distance < r * cell_size.
            // Strict comparison: an equal-distance point farther out could
            // still win its tie on id.
            if best.len() == k && best[k - 1].0 < ring as f64 * self.grid.cell_size {
                break;
            }
        }

        let mut d_x = 0.0f64;
        let mut d_y = 0.0f64;
        for &(_, _, jx, jy) in &best {
            d_x = d_x.max((jx - x).abs());
            d_y = d_y.max((jy - y).abs());
        }
        (best.last().map(|b| b.0).unwrap_or(0.0), d_x, d_y, best.len() as u32)
    }

    /// Inserts point `id` at `(x, y)`. Existing points whose IR contains the
    /// new point are re-searched; IMR hits only bump a count.
    pub fn insert_point(&mut self, id: usize, x: f64, y: f64) -> Result<()> {
        if self.records.contains_key(&id) {
            return Err(Error::Config(format!("point id {id} already live")));
        }
        let k = self.k;
        let mut resurvey = Vec::new();
        for (&j, rec) in self.records.iter_mut() {
            if rec.ir_contains_for(x, y, k) {
                resurvey.push(j);
            } else {
                if rec.imr_x_contains(x) {
                    rec.n_x += 1;
                }
                if rec.imr_y_contains(y) {
                    rec.n_y += 1;
                }
            }
        }
        self.grid.insert(id, x, y);
        self.axis_x.insert(x);
        self.axis_y.insert(y);
        let rec = self.survey_point(id, x, y);
        self.records.insert(id, rec);
        self.resurvey_all(&resurvey);
        self.maybe_rebuild_grid();
        if self.audit {
            self.audit_regions();
        }
        Ok(())
    }

    /// Removes point `id`, symmetric to [`MiState::insert_point`].
    pub fn remove_point(&mut self, id: usize) -> Result<()> {
        let gone = self.records.remove(&id).ok_or(Error::PointNotFound(id))?;
        self.grid.remove(id, gone.x, gone.y);
        self.axis_x.remove(gone.x);
        self.axis_y.remove(gone.y);
        let k = self.k;
        let mut resurvey = Vec::new();
        for (&j, rec) in self.records.iter_mut() {
            if rec.ir_contains_for(gone.x, gone.y, k) {
                resurvey.push(j);
            } else {
                if rec.imr_x_contains(gone.x) {
                    rec.n_x -= 1;
                }
                if rec.imr_y_contains(gone.y) {
                    rec.n_y -= 1;
                }
            }
        }
        self.resurvey_all(&resurvey);
        self.maybe_rebuild_grid();
        if self.audit {
            self.audit_regions();
        }
        Ok(())
    }

    fn resurvey_all(&mut self, ids: &[usize]) {
        for &j in ids {
            let (px, py) = {
                let r = &self.records[&j];
                (r.x, r.y)
            };
            let rec = self.survey_point(j, px, py);
            self.records.insert(j, rec);
        }
    }

    /// Slides the state from its current window to `to`: removes `from \ to`,
    /// inserts `to \ from`, keeps the overlap.
    pub fn slide(&mut self, pair: &TimeSeriesPair, from: Window, to: Window) -> Result<()> {
        if from != self.window {
            return Err(Error::StateDesync { expected: self.window, given: from });
        }
        to.check_against(pair.len())?;
        if to.size() <= self.k {
            return Err(Error::InsufficientSamples { n: to.size(), k: self.k });
        }
        if to == from {
            return Ok(());
        }
        for i in from.start..from.end {
            if !to.contains(i) {
                self.remove_point(i)?;
            }
        }
        for i in to.start..to.end {
            if !from.contains(i) {
                let (x, y) = pair.point(i);
                self.insert_point(i, x, y)?;
            }
        }
        self.window = to;
        Ok(())
    }

    /// Cost in point mutations of sliding to `to`.
    pub fn slide_cost(&self, to: Window) -> usize {
        let overlap = self.window.intersect(&to).map(|w| w.size()).unwrap_or(0);
        (self.window.size() - overlap) + (to.size() - overlap)
    }

    fn maybe_rebuild_grid(&mut self) {
        let n = self.records.len();
        if n == 0 {
            return;
        }
        if n > 2 * self.built_n || 2 * n < self.built_n {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for rec in self.records.values() {
                lo = lo.min(rec.x.min(rec.y));
                hi = hi.max(rec.x.max(rec.y));
            }
            let range = (hi - lo).max(1e-12);
            let cell = (range * (self.k as f64 / n as f64).sqrt()).max(1e-12);
            let mut grid = BoxGrid::new(cell);
            for (&id, rec) in &self.records {
                grid.insert(id, rec.x, rec.y);
            }
            self.grid = grid;
            self.built_n = n;
        }
    }

    /// Recomputes every region from scratch and panics on drift. Debug aid;
    /// off by default.
    fn audit_regions(&mut self) {
        let snapshot: Vec<(usize, PointRecord)> =
            self.records.iter().map(|(&id, &r)| (id, r)).collect();
        let searches_before = self.knn_searches;
        for (id, rec) in snapshot {
            let fresh = self.survey_point(id, rec.x, rec.y);
            assert!(
                (fresh.knn_dist - rec.knn_dist).abs() <= 1e-12
                    && fresh.n_x == rec.n_x
                    && fresh.n_y == rec.n_y,
                "region audit failed for point {id}: {rec:?} vs {fresh:?}"
            );
        }
        self.knn_searches = searches_before;
    }

    /// MI estimate for the current point set. The digamma sums are rebuilt
    /// from the integer counts, so this equals the scratch estimator.
    pub fn finalize(&self) -> MiEstimate {
        let n = self.records.len();
        let mut nx = Vec::with_capacity(n);
        let mut ny = Vec::with_capacity(n);
        let mut kth = Vec::with_capacity(n);
        let mut xs = Vec::with_capacity(n);
        let mut ys = Vec::with_capacity(n);
        // Record order is ascending id, i.e. window order: the standardizing
        // term sums in exactly the scratch estimator's order.
        for rec in self.records.values() {
            nx.push(rec.n_x as usize);
            ny.push(rec.n_y as usize);
            kth.push(rec.knn_dist);
            xs.push(rec.x);
            ys.push(rec.y);
        }
        let mi_raw = mi_from_counts(&nx, &ny, n, self.k, MarginalConvention::IncludeSelf);
        let entropy = entropy_from_distances(&kth, self.k) - log_std_product(&xs, &ys);
        let (mi, normalized, degenerate) = normalized_from(mi_raw, entropy);
        MiEstimate { mi_nats: mi, entropy_nats: entropy, normalized, n, k: self.k, degenerate }
    }
}

fn cell_size_for(pair: &TimeSeriesPair, window: Window, k: usize) -> f64 {
    let n = window.size();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in window.start..window.end {
        let (x, y) = pair.point(i);
        lo = lo.min(x.min(y));
        hi = hi.max(x.max(y));
    }
    let range = (hi - lo).max(1e-12);
    (range * (k as f64 / n as f64).sqrt()).max(1e-12)
}

/// Cells at Chebyshev distance exactly `ring` from `(cx, cy)`.
fn ring_cells(cx: i64, cy: i64, ring: i64) -> Vec<(i64, i64)> {
    if ring == 0 {
        return vec![(cx, cy)];
    }
    let mut out = Vec::with_capacity((8 * ring) as usize);
    for dx in -ring..=ring {
        out.push((cx + dx, cy - ring));
        out.push((cx + dx, cy + ring));
    }
    for dy in (-ring + 1)..ring {
        out.push((cx - ring, cy + dy));
        out.push((cx + ring, cy + dy));
    }
    out
}
