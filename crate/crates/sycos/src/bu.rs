//! Bottom-up search: late-acceptance hill climbing from minimal windows.
//! Each climb starts at the lowest unexplored index and grows/moves its
//! window through a step-δ neighborhood; a short memory of past MI values
//! lets the climb cross small plateaus before giving up.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::engine::MiEngine;
use crate::error::Result;
use crate::noise::verdict_with_raw;
use crate::types::{
    CorrelatedWindow, MethodTag, ResultSet, SearchOptions, SearchParams, SearchStats,
    TimeSeriesPair, Window,
};

/// Climb state: the window being improved and the late-acceptance memory.
#[derive(Debug, Clone)]
pub struct LahcState {
    pub current: Window,
    /// Left boundary the climb was confined to; candidates never cross it.
    pub region_start: usize,
    /// Normalized MI of `current`.
    pub current_mi: f64,
    /// Raw MI of `current`, in nats; tie-breaker for saturated noise checks.
    pub current_mi_raw: f64,
    /// Ring of h past MI values; a candidate may also beat a random entry.
    pub history: Vec<f64>,
    /// Consecutive non-improving iterations.
    pub idle: usize,
}

/// Extension directions a climb can move in; prunable independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Left,
    Right,
}

/// Per-climb pruning state: consecutive noise streaks and removed directions.
#[derive(Debug, Clone, Copy, Default)]
pub struct DirectionStreaks {
    left: usize,
    right: usize,
    left_pruned: bool,
    right_pruned: bool,
}

impl DirectionStreaks {
    pub fn is_pruned(&self, dir: Direction) -> bool {
        match dir {
            Direction::Left => self.left_pruned,
            Direction::Right => self.right_pruned,
        }
    }
}

/// All valid windows one δ-step from `w`: start and/or end moved by ±δ.
/// Candidates never reach left of `region_start`, which keeps climbs on
/// disjoint data. Returned in (start, end) order for deterministic ties.
pub fn neighborhood(
    w: Window,
    delta: usize,
    n: usize,
    params: &SearchParams,
    region_start: usize,
    streaks: &DirectionStreaks,
) -> Vec<Window> {
    let mut out = Vec::with_capacity(8);
    for ds in [-1i64, 0, 1] {
        for de in [-1i64, 0, 1] {
            if ds == 0 && de == 0 {
                continue;
            }
            if (ds < 0 && streaks.left_pruned) || (de > 0 && streaks.right_pruned) {
                continue;
            }
            let start = w.start as i64 + ds * delta as i64;
            let end = w.end as i64 + de * delta as i64;
            if start < region_start as i64 || end > n as i64 || start >= end {
                continue;
            }
            let cand = Window::new(start as usize, end as usize);
            if cand.size() >= params.s_min && cand.size() <= params.s_max {
                out.push(cand);
            }
        }
    }
    out.sort_by_key(|c| (c.start, c.end));
    out
}

/// One noise check on the δ-extension in `dir`; at `p` consecutive noise
/// verdicts the direction is dropped for the rest of the climb.
pub fn bu_prune_direction(
    engine: &mut MiEngine<'_>,
    state: &LahcState,
    dir: Direction,
    params: &SearchParams,
    region_start: usize,
    streaks: &mut DirectionStreaks,
) -> Result<()> {
    let delta = params.delta_bu_value();
    let n = engine.pair().len();
    let (ext, streak, pruned) = match dir {
        Direction::Left => {
            if streaks.left_pruned || state.current.start < region_start + delta {
                return Ok(());
            }
            let ext = Window::new(state.current.start - delta, state.current.start);
            (ext, &mut streaks.left, &mut streaks.left_pruned)
        }
        Direction::Right => {
            if streaks.right_pruned || state.current.end + delta > n {
                return Ok(());
            }
            let ext = Window::new(state.current.end, state.current.end + delta);
            (ext, &mut streaks.right, &mut streaks.right_pruned)
        }
    };
    if ext.size() <= params.k {
        return Ok(());
    }
    let i_ext = engine.eval_scratch(ext)?.normalized;
    let mixture = Window::new(state.current.start.min(ext.start), state.current.end.max(ext.end));
    // The mixture is a δ-extension of a recently evaluated window, so the
    // sliding path reaches it cheaply.
    let mix_est = engine.eval(mixture)?;
    let v = verdict_with_raw(
        state.current_mi,
        i_ext,
        mix_est.normalized,
        state.current_mi_raw,
        mix_est.mi_nats,
        params.tau(),
    );
    if v.is_noise {
        *streak += 1;
        if *streak >= params.p {
            *pruned = true;
            engine.stats.prune_events += 1;
        }
    } else {
        *streak = 0;
    }
    Ok(())
}

/// Runs the bottom-up search over the whole series.
pub fn run_bu(
    pair: &TimeSeriesPair,
    params: &SearchParams,
    options: SearchOptions,
) -> Result<(ResultSet, SearchStats)> {
    let (res, stats, _) = run_bu_traced(pair, params, options)?;
    Ok((res, stats))
}

/// As [`run_bu`], additionally returning each climb's terminal state for
/// callers that want to inspect local optimality.
pub fn run_bu_traced(
    pair: &TimeSeriesPair,
    params: &SearchParams,
    options: SearchOptions,
) -> Result<(ResultSet, SearchStats, Vec<LahcState>)> {
    params.validate(pair.len())?;
    let n = pair.len();
    let mut engine = MiEngine::new(pair, params.k, options.incremental);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut results = ResultSet::default();
    let mut traces = Vec::new();

    let mut region_start = 0usize;
    while region_start + params.s_min <= n {
        let state = climb(&mut engine, &mut rng, region_start, params, options)?;
        // Accepted windows are re-verified from scratch; the climb's own
        // estimates came through the incremental path.
        let recheck = engine.eval_scratch(state.current)?;
        let mut next = region_start + params.s_min;
        if recheck.normalized >= params.sigma {
            results.insert_disjoint(CorrelatedWindow {
                window: state.current,
                mi: recheck.mi_nats,
                normalized_mi: recheck.normalized,
                method_tag: MethodTag::BU,
            })?;
            next = next.max(state.current.end);
        }
        traces.push(state);
        region_start = next;
    }
    Ok((results, engine.stats, traces))
}

fn climb(
    engine: &mut MiEngine<'_>,
    rng: &mut ChaCha8Rng,
    region_start: usize,
    params: &SearchParams,
    options: SearchOptions,
) -> Result<LahcState> {
    let n = engine.pair().len();
    let delta = params.delta_bu_value();
    let w0 = Window::new(region_start, region_start + params.s_min);
    engine.stats.windows_visited += 1;
    let est0 = engine.eval(w0)?;
    let mut state = LahcState {
        current: w0,
        region_start,
        current_mi: est0.normalized,
        current_mi_raw: est0.mi_nats,
        history: vec![est0.normalized; params.h.max(1)],
        idle: 0,
    };
    let mut streaks = DirectionStreaks::default();

    loop {
        if options.noise_pruning {
            bu_prune_direction(engine, &state, Direction::Left, params, region_start, &mut streaks)?;
            bu_prune_direction(engine, &state, Direction::Right, params, region_start, &mut streaks)?;
        }
        let candidates = neighborhood(state.current, delta, n, params, region_start, &streaks);
        if candidates.is_empty() {
            break;
        }
        let mut best: Option<(Window, crate::ksg::MiEstimate)> = None;
        for cand in candidates {
            engine.stats.windows_visited += 1;
            let est = engine.eval(cand)?;
            // Strict > keeps the first (lowest (start, end)) among ties.
            if best.map_or(true, |(_, b)| est.normalized > b.normalized) {
                best = Some((cand, est));
            }
        }
        let (best_w, best_est) = best.unwrap();
        let best_mi = best_est.normalized;
        let slot = rng.gen_range(0..state.history.len());
        if best_mi > state.history[slot] || best_mi > state.current_mi {
            state.current = best_w;
            state.current_mi = best_mi;
            state.current_mi_raw = best_est.mi_nats;
            state.idle = 0;
        } else {
            state.idle += 1;
        }
        if state.current_mi > state.history[slot] {
            state.history[slot] = state.current_mi;
        }
        if state.idle > params.t_max_idle {
            break;
        }
    }
    Ok(state)
}
