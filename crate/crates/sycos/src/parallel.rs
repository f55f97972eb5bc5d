//! Chunked parallel execution: the series is cut into per-worker chunks that
//! overlap by s_max, so no window of legal size can straddle a boundary
//! unseen. Workers share nothing; a deterministic merge reconciles overlaps.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::bu::run_bu;
use crate::error::{Error, Result};
use crate::selector::{select, SelectionReport};
use crate::td::{run_td, LayerSchedule};
use crate::types::{
    CorrelatedWindow, MethodTag, ResultSet, SearchOptions, SearchParams, SearchStats,
    TimeSeriesPair, Window,
};

/// Which search to run; `Auto` profiles first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Method {
    TD,
    BU,
    Auto,
}

/// Overlapping chunk layout covering `[0, n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkPlan {
    pub chunks: Vec<Window>,
}

/// Chunk `i` spans `[i*n/n_p - s_max, (i+1)*n/n_p)`, clipped to the series.
pub fn plan_chunks(n: usize, n_p: usize, s_max: usize) -> Result<ChunkPlan> {
    if n_p == 0 {
        return Err(Error::Config("need at least one chunk".into()));
    }
    if n_p > n {
        return Err(Error::Config(format!("cannot cut {n} samples into {n_p} chunks")));
    }
    let chunks = (0..n_p)
        .map(|i| {
            let nominal = i * n / n_p;
            Window::new(nominal.saturating_sub(s_max), (i + 1) * n / n_p)
        })
        .collect();
    Ok(ChunkPlan { chunks })
}

/// Per-chunk outcome, in chunk order.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ChunkReport {
    pub chunk: Window,
    pub stats: SearchStats,
    pub windows_found: usize,
}

/// Outcome of a parallel run.
#[derive(Debug, Clone, PartialEq)]
pub struct ParallelOutcome {
    pub results: ResultSet,
    pub chunk_reports: Vec<ChunkReport>,
    /// Present when `Auto` ran the profiling step.
    pub selection: Option<SelectionReport>,
}

/// Runs `method` over one series in-process (single chunk, no threads).
pub fn run_method(
    pair: &TimeSeriesPair,
    params: &SearchParams,
    method: MethodTag,
    options: SearchOptions,
) -> Result<(ResultSet, SearchStats)> {
    match method {
        MethodTag::TD => {
            let s_max = params.s_max.min(pair.len());
            let mut local = *params;
            local.s_max = s_max;
            let schedule = LayerSchedule::geometric(s_max, params.s_min)?;
            run_td(pair, &local, &schedule, options)
        }
        MethodTag::BU => run_bu(pair, params, options),
    }
}

/// Searches every chunk independently on up to `workers` threads and merges.
///
/// Chunk 0 inherits the run's seed, so a single-chunk parallel run is
/// bit-identical to the sequential search. The merge keeps the window with
/// the higher normalized MI wherever chunk overlaps produced conflicts, and
/// depends only on chunk contents, never on scheduling order.
pub fn run_parallel(
    pair: &TimeSeriesPair,
    params: &SearchParams,
    method: Method,
    n_p: usize,
    workers: usize,
    options: SearchOptions,
) -> Result<ParallelOutcome> {
    params.validate(pair.len())?;
    if workers == 0 {
        return Err(Error::Config("need at least one worker".into()));
    }
    let (tag, selection) = match method {
        Method::TD => (MethodTag::TD, None),
        Method::BU => (MethodTag::BU, None),
        Method::Auto => {
            let report = select(pair, params)?;
            (report.chosen, Some(report))
        }
    };
    let plan = plan_chunks(pair.len(), n_p, params.s_max)?;
    let n_chunks = plan.chunks.len();

    let slots: Vec<Mutex<Option<Result<(ResultSet, SearchStats)>>>> =
        (0..n_chunks).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);

    std::thread::scope(|scope| {
        for _ in 0..workers.min(n_chunks) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n_chunks {
                    break;
                }
                let chunk = plan.chunks[i];
                let outcome = catch_unwind(AssertUnwindSafe(|| {
                    let slice = pair.slice(chunk)?;
                    let mut local = *params;
                    local.seed = worker_seed(params.seed, i);
                    local.s_max = params.s_max.min(chunk.size());
                    run_method(&slice, &local, tag, options)
                }))
                .unwrap_or_else(|_| Err(Error::WorkerFailed { chunk: i }));
                *slots[i].lock().unwrap() = Some(outcome);
            });
        }
    });

    let mut all = Vec::new();
    let mut chunk_reports = Vec::with_capacity(n_chunks);
    for (i, slot) in slots.into_iter().enumerate() {
        let (res, stats) = slot
            .into_inner()
            .unwrap()
            .unwrap_or(Err(Error::WorkerFailed { chunk: i }))?;
        let chunk = plan.chunks[i];
        chunk_reports.push(ChunkReport { chunk, stats, windows_found: res.len() });
        for w in res.iter() {
            // Back to global indices.
            all.push(CorrelatedWindow {
                window: Window::new(w.window.start + chunk.start, w.window.end + chunk.start),
                ..*w
            });
        }
    }
    Ok(ParallelOutcome { results: merge_windows(all)?, chunk_reports, selection })
}

fn worker_seed(seed: u64, chunk: usize) -> u64 {
    if chunk == 0 {
        return seed;
    }
    // splitmix64 of (seed, chunk) keeps worker streams well separated.
    let mut z = seed.wrapping_add((chunk as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Order-independent dedup: strongest windows claim their span first.
fn merge_windows(mut all: Vec<CorrelatedWindow>) -> Result<ResultSet> {
    all.sort_by(|a, b| {
        b.normalized_mi
            .total_cmp(&a.normalized_mi)
            .then(a.window.start.cmp(&b.window.start))
            .then(a.window.end.cmp(&b.window.end))
    });
    let mut kept: Vec<CorrelatedWindow> = Vec::new();
    for w in all {
        if kept.iter().all(|k| !k.window.overlaps(&w.window)) {
            // Identical duplicates from overlap zones collapse here too.
            if !kept.iter().any(|k| k.window == w.window) {
                kept.push(w);
            }
        }
    }
    let mut out = ResultSet::default();
    for w in kept {
        out.insert_disjoint(w)?;
    }
    Ok(out)
}
