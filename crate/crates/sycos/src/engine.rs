//! Central MI evaluator used by both searches. Owns the optional incremental
//! state and the instrumentation counters, so callers just ask for the MI of
//! a window and the engine decides between sliding and rebuilding.

use crate::error::Result;
use crate::incremental::MiState;
use crate::ksg::{estimate_mi, MiEstimate};
use crate::types::{SearchStats, TimeSeriesPair, Window};

pub struct MiEngine<'a> {
    pair: &'a TimeSeriesPair,
    k: usize,
    incremental: bool,
    state: Option<MiState>,
    pub stats: SearchStats,
}

impl<'a> MiEngine<'a> {
    pub fn new(pair: &'a TimeSeriesPair, k: usize, incremental: bool) -> Self {
        Self { pair, k, incremental, state: None, stats: SearchStats::default() }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn pair(&self) -> &TimeSeriesPair {
        self.pair
    }

    /// MI of `w`, reusing the previously evaluated window when sliding is
    /// cheaper than a rebuild. The engine adopts `w` as its new position.
    pub fn eval(&mut self, w: Window) -> Result<MiEstimate> {
        self.stats.mi_evaluations += 1;
        if !self.incremental {
            return self.scratch(w);
        }
        if let Some(mut st) = self.state.take() {
            // Each point mutation costs about k+1 searches: its own survey
            // plus the resurvey of the ~k points whose neighborhoods it
            // intersects. A rebuild costs one search per window point.
            if st.slide_cost(w) * (self.k + 1) < w.size() {
                let before = st.knn_searches();
                let from = st.window();
                st.slide(self.pair, from, w)?;
                self.stats.knn_searches += st.knn_searches() - before;
                let est = st.finalize();
                self.state = Some(st);
                return Ok(est);
            }
        }
        let st = MiState::build(self.pair, w, self.k)?;
        self.stats.knn_searches += st.knn_searches();
        let est = st.finalize();
        self.state = Some(st);
        Ok(est)
    }

    /// Brute-force MI of `w`, leaving the incremental state untouched. Used
    /// for side evaluations (noise checks, acceptance re-verification).
    pub fn eval_scratch(&mut self, w: Window) -> Result<MiEstimate> {
        self.stats.mi_evaluations += 1;
        self.scratch(w)
    }

    fn scratch(&mut self, w: Window) -> Result<MiEstimate> {
        let slice = self.pair.slice(w)?;
        self.stats.knn_searches += w.size() as u64;
        estimate_mi(&slice, self.k)
    }
}
