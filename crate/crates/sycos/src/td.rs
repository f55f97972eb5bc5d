//! Top-down search: slide windows of decreasing size over the data, harvest
//! correlated windows, and pass only the uncorrelated remains to the next
//! (smaller) layer.

use crate::engine::MiEngine;
use crate::error::{Error, Result};
use crate::noise::{check_noise, verdict_with_raw};
use crate::types::{
    CorrelatedWindow, MethodTag, ResultSet, SearchOptions, SearchParams, SearchStats,
    TimeSeriesPair, Window,
};

/// Strictly decreasing window sizes, largest first, smallest last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerSchedule {
    sizes: Vec<usize>,
}

impl LayerSchedule {
    /// Geometric halving from `s_max` down to `s_min`, with `s_min` appended
    /// when the halving sequence skips over it.
    pub fn geometric(s_max: usize, s_min: usize) -> Result<Self> {
        if s_min == 0 || s_min > s_max {
            return Err(Error::Config(format!(
                "invalid size bounds: s_min={s_min}, s_max={s_max}"
            )));
        }
        let mut sizes = Vec::new();
        let mut size = s_max;
        while size > s_min {
            sizes.push(size);
            size /= 2;
        }
        sizes.push(s_min);
        Ok(Self { sizes })
    }

    /// User-supplied explicit sizes; must be strictly decreasing within the
    /// `[s_min, s_max]` bounds.
    pub fn explicit(sizes: Vec<usize>, s_min: usize, s_max: usize) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::Config("empty layer schedule".into()));
        }
        if !sizes.windows(2).all(|w| w[0] > w[1]) {
            return Err(Error::Config("layer sizes must be strictly decreasing".into()));
        }
        if sizes[0] > s_max || *sizes.last().unwrap() < s_min {
            return Err(Error::Config(format!(
                "layer sizes must lie within [{s_min}, {s_max}]"
            )));
        }
        Ok(Self { sizes })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }
}

/// Decision after a noise check on the next shift position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TdStep {
    /// Proceed to the shifted window normally.
    Shift,
    /// Consecutive noise budget exhausted: jump past the shifted window.
    SkipPastWindow,
}

/// One pruning decision for the slide from `current` to `shifted` (same size,
/// overlapping). The fresh tail of `shifted` is checked for noise against the
/// overlap; `streak` carries the consecutive-noise count across calls and is
/// reset both by a clean verdict and by a skip.
pub fn td_noise_step(
    pair: &TimeSeriesPair,
    current: Window,
    shifted: Window,
    params: &SearchParams,
    streak: &mut usize,
) -> Result<TdStep> {
    if shifted.size() != current.size() || shifted.start <= current.start
        || shifted.start >= current.end
    {
        return Err(Error::Config(format!(
            "shifted window {shifted} must overlap {current} to its right"
        )));
    }
    let overlap = Window::new(shifted.start, current.end);
    let tail = Window::new(current.end, shifted.end);
    let v = check_noise(pair, overlap, tail, params.tau(), params.k)?;
    Ok(apply_streak(v.is_noise, streak, params.p))
}

fn apply_streak(is_noise: bool, streak: &mut usize, p: usize) -> TdStep {
    if is_noise {
        *streak += 1;
        if *streak >= p {
            *streak = 0;
            return TdStep::SkipPastWindow;
        }
    } else {
        *streak = 0;
    }
    TdStep::Shift
}

/// Runs the full multi-layer top-down search.
pub fn run_td(
    pair: &TimeSeriesPair,
    params: &SearchParams,
    schedule: &LayerSchedule,
    options: SearchOptions,
) -> Result<(ResultSet, SearchStats)> {
    params.validate(pair.len())?;
    if schedule.sizes[0] > params.s_max || *schedule.sizes.last().unwrap() < params.s_min {
        return Err(Error::Config(
            "layer schedule falls outside the configured size bounds".into(),
        ));
    }
    let mut engine = MiEngine::new(pair, params.k, options.incremental);
    let mut results = ResultSet::default();
    let mut partitions = vec![Window::new(0, pair.len())];

    for &size in &schedule.sizes {
        let mut next = Vec::new();
        for &part in &partitions {
            if part.size() < size {
                next.push(part);
                continue;
            }
            sweep_layer(&mut engine, part, size, params, options, &mut results, &mut next)?;
        }
        partitions = next;
    }
    Ok((results, engine.stats))
}

/// Slides windows of one size over one uncorrelated partition. Correlated
/// hits go to `results`; the uncorrelated remains (length ≥ s_min) go to
/// `next` for the layer below.
fn sweep_layer(
    engine: &mut MiEngine<'_>,
    part: Window,
    size: usize,
    params: &SearchParams,
    options: SearchOptions,
    results: &mut ResultSet,
    next: &mut Vec<Window>,
) -> Result<()> {
    let delta = params.delta_td_for(size);
    let mut pending_start = part.start;
    let mut start = part.start;
    let mut streak = 0usize;
    // MI of the window at `start`, when the pruning path already computed it.
    let mut carried = None;

    while start + size <= part.end {
        let w = Window::new(start, start + size);
        let est = match carried.take() {
            Some(e) => e,
            None => {
                engine.stats.windows_visited += 1;
                engine.eval(w)?
            }
        };
        if est.normalized >= params.sigma {
            results.insert_disjoint(CorrelatedWindow {
                window: w,
                mi: est.mi_nats,
                normalized_mi: est.normalized,
                method_tag: MethodTag::TD,
            })?;
            // The pending partition ends where the hit starts; exploration
            // resumes on fresh data past the hit.
            if w.start - pending_start >= params.s_min {
                next.push(Window::new(pending_start, w.start));
            }
            pending_start = w.end;
            start = w.end;
            streak = 0;
            continue;
        }
        let next_start = start + delta;
        if next_start + size > part.end {
            break;
        }
        let shifted = Window::new(next_start, next_start + size);
        if options.noise_pruning && delta > params.k && size > delta + params.k {
            // The three values the check needs are all one δ-slide apart:
            // current → overlap drops δ points, overlap → shifted adds δ, and
            // only the δ-sized tail needs a scratch pass. The shifted window
            // doubles as the check's mixture and its MI is carried into the
            // next iteration instead of re-evaluated.
            let overlap = Window::new(shifted.start, w.end);
            let tail = Window::new(w.end, shifted.end);
            let base_est = engine.eval(overlap)?;
            let i_ext = engine.eval_scratch(tail)?.normalized;
            engine.stats.windows_visited += 1;
            let est_shift = engine.eval(shifted)?;
            let v = verdict_with_raw(
                base_est.normalized,
                i_ext,
                est_shift.normalized,
                base_est.mi_nats,
                est_shift.mi_nats,
                params.tau(),
            );
            match apply_streak(v.is_noise, &mut streak, params.p) {
                TdStep::SkipPastWindow => {
                    engine.stats.prune_events += 1;
                    start = shifted.end;
                }
                TdStep::Shift => {
                    start = next_start;
                    carried = Some(est_shift);
                }
            }
        } else {
            start = next_start;
        }
    }
    if part.end - pending_start >= params.s_min {
        next.push(Window::new(pending_start, part.end));
    }
    Ok(())
}
