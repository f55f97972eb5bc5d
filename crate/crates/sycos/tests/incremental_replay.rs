//! The incremental MI state must reproduce the scratch estimator exactly
//! under arbitrary edit sequences, while doing much less k-NN work when
//! windows slide.

mod common;

use common::{median, rel_close};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use sycos::datagen::gaussian_pair;
use sycos::{estimate_mi, MiState, TimeSeriesPair, Window};

const K: usize = 4;

fn scratch_of(live: &BTreeMap<usize, (f64, f64)>) -> f64 {
    let xs: Vec<f64> = live.values().map(|&(x, _)| x).collect();
    let ys: Vec<f64> = live.values().map(|&(_, y)| y).collect();
    let pair = TimeSeriesPair::new(xs, ys).unwrap();
    estimate_mi(&pair, K).unwrap().mi_nats
}

#[test]
fn random_edit_sequences_match_scratch() {
    let pair = gaussian_pair(3000, 0.8, 11).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5150);
    let w0 = Window::new(0, 120);
    let mut state = MiState::build(&pair, w0, K).unwrap();
    let mut live: BTreeMap<usize, (f64, f64)> = (w0.start..w0.end)
        .map(|i| (i, pair.point(i)))
        .collect();
    let mut next_id = w0.end;

    for step in 0..300 {
        let remove = rng.gen_bool(0.4) && live.len() > K + 8;
        if remove {
            let nth = rng.gen_range(0..live.len());
            let id = *live.keys().nth(nth).unwrap();
            live.remove(&id);
            state.remove_point(id).unwrap();
        } else {
            let (x, y) = pair.point(next_id % pair.len());
            live.insert(next_id, (x, y));
            state.insert_point(next_id, x, y).unwrap();
            next_id += 1;
        }
        if step % 10 == 0 {
            let inc = state.finalize().mi_nats;
            let scr = scratch_of(&live);
            assert!(
                rel_close(inc, scr, 1e-9),
                "step {step}: incremental {inc:.12} vs scratch {scr:.12}"
            );
        }
    }
}

proptest::proptest! {
    #![proptest_config(proptest::prelude::ProptestConfig {
        cases: 12, ..Default::default()
    })]
    #[test]
    fn arbitrary_edit_scripts_match_scratch(
        ops in proptest::collection::vec(0u8..=255, 20..80),
        seed in 0u64..1000,
    ) {
        let pair = gaussian_pair(800, 0.5, seed).unwrap();
        let w0 = Window::new(0, 60);
        let mut state = MiState::build(&pair, w0, K).unwrap();
        let mut live: BTreeMap<usize, (f64, f64)> = (w0.start..w0.end)
            .map(|i| (i, pair.point(i)))
            .collect();
        let mut next_id = w0.end;
        for (step, &op) in ops.iter().enumerate() {
            if op % 2 == 0 || live.len() <= K + 4 {
                let (x, y) = pair.point(next_id % pair.len());
                live.insert(next_id, (x, y));
                state.insert_point(next_id, x, y).unwrap();
                next_id += 1;
            } else {
                let nth = (op as usize / 2) % live.len();
                let id = *live.keys().nth(nth).unwrap();
                live.remove(&id);
                state.remove_point(id).unwrap();
            }
            let inc = state.finalize().mi_nats;
            let scr = scratch_of(&live);
            proptest::prop_assert!(
                rel_close(inc, scr, 1e-9),
                "step {}: incremental {} vs scratch {}", step, inc, scr
            );
        }
    }
}

#[test]
fn unit_slides_do_a_fraction_of_scratch_work() {
    let pair = gaussian_pair(2500, 0.7, 3).unwrap();
    let w = 200usize;
    let mut state = MiState::build(&pair, Window::new(0, w), K).unwrap();
    let mut per_slide = Vec::new();
    for s in 1..=2000usize {
        let before = state.knn_searches();
        state
            .slide(&pair, Window::new(s - 1, s - 1 + w), Window::new(s, s + w))
            .unwrap();
        per_slide.push((state.knn_searches() - before) as f64);
    }
    let med = median(&mut per_slide);
    // A scratch evaluation costs one search per window point.
    assert!(
        med < 0.25 * w as f64,
        "median k-NN searches per unit slide = {med}, window = {w}"
    );
}

#[test]
fn build_cost_scales_subquadratically() {
    // Doubling n should far less than quadruple the build time; with the
    // grid and sorted marginals it should stay under 3x.
    let time_build = |n: usize| {
        let pair = gaussian_pair(n, 0.6, 21).unwrap();
        let mut best = f64::INFINITY;
        for _ in 0..3 {
            let t0 = std::time::Instant::now();
            let state = MiState::build(&pair, Window::new(0, n), K).unwrap();
            let dt = t0.elapsed().as_secs_f64();
            assert!(state.finalize().mi_nats.is_finite());
            best = best.min(dt);
        }
        best
    };
    let t1 = time_build(6000);
    let t2 = time_build(12000);
    assert!(
        t2 < 3.0 * t1.max(1e-4),
        "build time grew {:.2}x when n doubled (t1={t1:.4}s, t2={t2:.4}s)",
        t2 / t1
    );
}

#[test]
fn long_window_slide_matches_scratch_on_real_layout() {
    // Slide a mid-size window across a series containing both correlated and
    // independent stretches; spot-check finalize against scratch throughout.
    let (pair, _) = common::block_fixture(1500, 2, 300, 0.2, 9);
    let w = 150usize;
    let mut state = MiState::build(&pair, Window::new(0, w), K).unwrap();
    for s in 1..=(pair.len() - w) {
        state
            .slide(&pair, Window::new(s - 1, s - 1 + w), Window::new(s, s + w))
            .unwrap();
        if s % 37 == 0 {
            let slice = pair.slice(Window::new(s, s + w)).unwrap();
            let scr = estimate_mi(&slice, K).unwrap();
            let inc = state.finalize();
            assert!(
                rel_close(inc.mi_nats, scr.mi_nats, 1e-9)
                    && rel_close(inc.normalized, scr.normalized, 1e-9),
                "offset {s}: incremental ({}, {}) vs scratch ({}, {})",
                inc.mi_nats,
                inc.normalized,
                scr.mi_nats,
                scr.normalized
            );
        }
    }
}
