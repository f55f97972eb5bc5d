//! Acceptance gate: one test per release criterion, each printing a single
//! PASS/FAIL line with the measured numbers behind the verdict.

mod common;

use common::{coverage_jaccard, median, std_dev};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use std::time::Instant;
use sycos::bu::{neighborhood, DirectionStreaks};
use sycos::datagen::{
    gaussian_pair, generate_relation, generate_scenario, RelationKind, RelationSpec,
    ScenarioSpec,
};
use sycos::{
    estimate_mi, plan_chunks, run_bu, run_bu_traced, run_parallel, run_td, select,
    LayerSchedule, Method, MethodTag, ResultSet, SearchOptions, SearchParams,
    TimeSeriesPair, Window,
};

fn report(n: usize, name: &str, pass: bool, detail: &str) {
    println!(
        "[acceptance] criterion {n} ({name}): {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
}

#[test]
fn criterion_1_estimator_accuracy() {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    let mut details = Vec::new();
    for &rho in &[0.3f64, 0.6, 0.9] {
        let analytic = -0.5 * (1.0 - rho * rho).ln();
        let mut errs: Vec<f64> = (0..30)
            .map(|seed| {
                let pair = gaussian_pair(2000, rho, seed).unwrap();
                (estimate_mi(&pair, 4).unwrap().mi_nats - analytic).abs()
            })
            .collect();
        let med = median(&mut errs);
        worst = worst.max(med);
        details.push(format!("rho={rho}: {med:.4}"));
    }
    let elapsed = t0.elapsed().as_secs_f64();
    let pass = worst <= 0.10 && elapsed < 10.0;
    report(
        1,
        "estimator accuracy",
        pass,
        &format!("median |err| nats: {}; {elapsed:.2}s", details.join(", ")),
    );
    assert!(pass);
}

#[test]
fn criterion_2_relation_coverage() {
    let t0 = Instant::now();
    let params = SearchParams::default();
    let schedule = LayerSchedule::geometric(params.s_max, params.s_min).unwrap();
    let mut failures = Vec::new();
    for kind in RelationKind::ALL {
        let spec = RelationSpec::canonical(kind, 1000, 0.2, 5);
        let pair = generate_relation(&spec).unwrap();
        let (td, _) = run_td(&pair, &params, &schedule, SearchOptions::default()).unwrap();
        let (bu, _) = run_bu(&pair, &params, SearchOptions::default()).unwrap();
        let expect_hits = kind != RelationKind::Independent;
        if (td.is_empty() == expect_hits) || (bu.is_empty() == expect_hits) {
            failures.push(format!("{} (td={}, bu={})", kind.name(), td.len(), bu.len()));
        }
    }
    let elapsed = t0.elapsed().as_secs_f64();
    let pass = failures.is_empty() && elapsed < 60.0;
    report(
        2,
        "relation coverage",
        pass,
        &format!(
            "10 families, both searches; misses: [{}]; {elapsed:.1}s",
            failures.join(", ")
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_3_incremental_exactness() {
    let w = 200usize;
    let steps = 4000usize;
    let pair = gaussian_pair(w + steps, 0.6, 14).unwrap();
    let mut state = sycos::MiState::build(&pair, Window::new(0, w), 4).unwrap();
    let mut max_rel = 0.0f64;
    for s in 1..=steps {
        state
            .slide(&pair, Window::new(s - 1, s - 1 + w), Window::new(s, s + w))
            .unwrap();
        let scratch = estimate_mi(&pair.slice(Window::new(s, s + w)).unwrap(), 4).unwrap();
        let inc = state.finalize();
        let scale = scratch.mi_nats.abs().max(inc.mi_nats.abs()).max(1.0);
        max_rel = max_rel.max((scratch.mi_nats - inc.mi_nats).abs() / scale);
    }
    let pass = max_rel <= 1e-9;
    report(
        3,
        "incremental exactness",
        pass,
        &format!("{steps} unit slides, max relative gap {max_rel:.2e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_4_pruning_accuracy() {
    let mut min_td = 1.0f64;
    let mut min_bu = 1.0f64;
    for seed in 0..10u64 {
        let spec = ScenarioSpec::evenly_spaced(2000, 2, 400, RelationKind::Linear, 0.2, seed);
        let (pair, _) = generate_scenario(&spec).unwrap();
        let params = SearchParams { seed, ..SearchParams::default() };
        let schedule = LayerSchedule::geometric(params.s_max, params.s_min).unwrap();
        let pruned = SearchOptions::default();
        let plain = SearchOptions { noise_pruning: false, incremental: true };
        let (a, _) = run_td(&pair, &params, &schedule, pruned).unwrap();
        let (b, _) = run_td(&pair, &params, &schedule, plain).unwrap();
        min_td = min_td.min(coverage_jaccard(&a, &b, pair.len()));
        let (c, _) = run_bu(&pair, &params, pruned).unwrap();
        let (d, _) = run_bu(&pair, &params, plain).unwrap();
        min_bu = min_bu.min(coverage_jaccard(&c, &d, pair.len()));
    }
    let pass = min_td >= 0.8 && min_bu >= 0.8;
    report(
        4,
        "pruning accuracy",
        pass,
        &format!("10 fixtures, min overlap agreement: TD {min_td:.3}, BU {min_bu:.3}"),
    );
    assert!(pass);
}

#[test]
fn criterion_5_optimization_benefit() {
    let mut min_td = f64::INFINITY;
    let mut min_bu = f64::INFINITY;
    for seed in 0..10u64 {
        let spec = ScenarioSpec::evenly_spaced(3000, 1, 400, RelationKind::Linear, 0.2, seed);
        let (pair, _) = generate_scenario(&spec).unwrap();
        let params = SearchParams {
            s_min: 100,
            s_max: 500,
            delta_td: Some(8),
            delta_bu: Some(8),
            seed,
            ..SearchParams::default()
        };
        let schedule = LayerSchedule::geometric(params.s_max, params.s_min).unwrap();
        let (_, s_both) = run_td(&pair, &params, &schedule, SearchOptions::default()).unwrap();
        let (_, s_orig) = run_td(&pair, &params, &schedule, SearchOptions::origin()).unwrap();
        min_td = min_td.min(s_orig.knn_searches as f64 / s_both.knn_searches as f64);
        let (_, b_both) = run_bu(&pair, &params, SearchOptions::default()).unwrap();
        let (_, b_orig) = run_bu(&pair, &params, SearchOptions::origin()).unwrap();
        min_bu = min_bu.min(b_orig.knn_searches as f64 / b_both.knn_searches as f64);
    }
    let pass = min_td >= 1.5 && min_bu >= 1.5;
    report(
        5,
        "optimization benefit",
        pass,
        &format!("min k-NN search reduction: TD {min_td:.2}x, BU {min_bu:.2}x"),
    );
    assert!(pass);
}

#[test]
fn criterion_6_mixture_direction() {
    // Contaminants live on a support separated from the signal so the
    // component decomposition of the mixture MI applies.
    let n = 800;
    let mut ixy_all = Vec::new();
    let mut izw_all = Vec::new();
    for seed in 0..100u64 {
        let xy = gaussian_pair(n, 0.9, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xbeef);
        let far = Normal::new(10.0, 1.0).unwrap();
        let mut zs = Vec::with_capacity(n);
        let mut ws = Vec::with_capacity(n);
        for i in 0..n {
            zs.push(if rng.gen_bool(0.5) { xy.xs()[i] } else { far.sample(&mut rng) });
            ws.push(if rng.gen_bool(0.5) { xy.ys()[i] } else { far.sample(&mut rng) });
        }
        let zw = TimeSeriesPair::new(zs, ws).unwrap();
        ixy_all.push(estimate_mi(&xy, 4).unwrap().mi_nats);
        izw_all.push(estimate_mi(&zw, 4).unwrap().mi_nats);
    }
    let se = (std_dev(&ixy_all).powi(2) + std_dev(&izw_all).powi(2)).sqrt()
        / 2.0f64.sqrt();
    let ok = ixy_all
        .iter()
        .zip(&izw_all)
        .filter(|(ixy, izw)| **izw <= **ixy + 3.0 * se)
        .count();
    let mut ratios: Vec<f64> =
        ixy_all.iter().zip(&izw_all).map(|(ixy, izw)| izw / ixy).collect();
    let med = median(&mut ratios);
    let pass = ok >= 97 && (0.15..=0.35).contains(&med);
    report(
        6,
        "mixture MI direction",
        pass,
        &format!("held in {ok}/100 (3SE={:.3}); median ratio {med:.3}", 3.0 * se),
    );
    assert!(pass);
}

#[test]
fn criterion_7_selector_correctness() {
    let mut td_wins = 0;
    let mut bu_wins = 0;
    for seed in 0..10u64 {
        let dense =
            ScenarioSpec::evenly_spaced(4000, 3, 800, RelationKind::Linear, 0.2, seed);
        let (pair, _) = generate_scenario(&dense).unwrap();
        let pd = SearchParams { big_m: 8, seed, ..SearchParams::default() };
        if select(&pair, &pd).unwrap().chosen == MethodTag::TD {
            td_wins += 1;
        }
        let sparse =
            ScenarioSpec::evenly_spaced(6000, 5, 60, RelationKind::Linear, 0.2, seed);
        let (pair2, _) = generate_scenario(&sparse).unwrap();
        let ps = SearchParams { big_m: 20, seed, ..SearchParams::default() };
        if select(&pair2, &ps).unwrap().chosen == MethodTag::BU {
            bu_wins += 1;
        }
    }
    let pass = td_wins >= 8 && bu_wins >= 8;
    report(
        7,
        "selector correctness",
        pass,
        &format!("dense -> TD {td_wins}/10, sparse -> BU {bu_wins}/10"),
    );
    assert!(pass);
}

#[test]
fn criterion_8_parallel_equivalence() {
    let spec = ScenarioSpec::evenly_spaced(6000, 3, 500, RelationKind::Linear, 0.2, 9);
    let (pair, _) = generate_scenario(&spec).unwrap();
    let params = SearchParams { seed: 9, ..SearchParams::default() };
    let schedule = LayerSchedule::geometric(params.s_max, params.s_min).unwrap();
    let (seq, _) = run_td(&pair, &params, &schedule, SearchOptions::default()).unwrap();

    let one = run_parallel(&pair, &params, Method::TD, 1, 1, SearchOptions::default()).unwrap();
    let single_ok = one.results.windows() == seq.windows();

    let four = run_parallel(&pair, &params, Method::TD, 4, 1, SearchOptions::default()).unwrap();
    let plan = plan_chunks(pair.len(), 4, params.s_max).unwrap();
    let mut cuts: Vec<usize> = plan
        .chunks
        .iter()
        .flat_map(|c| [c.start, c.end])
        .filter(|&b| b != 0 && b != pair.len())
        .collect();
    cuts.dedup();
    let interior = |w: &Window| {
        cuts.iter()
            .all(|&b| w.end + params.s_max <= b || w.start >= b + params.s_max)
    };
    let project = |rs: &ResultSet| -> Vec<Window> {
        rs.iter().map(|c| c.window).filter(|w| interior(w)).collect()
    };
    let interior_ok = project(&seq) == project(&four.results);

    // Wall-clock scaling needs real hardware parallelism; measured and
    // reported honestly either way.
    let time_run = |workers: usize| {
        let t0 = Instant::now();
        run_parallel(&pair, &params, Method::TD, 4, workers, SearchOptions::default())
            .unwrap();
        t0.elapsed().as_secs_f64()
    };
    let t1 = time_run(1);
    let t4 = time_run(4);
    let wall_ok = t4 < t1;

    let pass = single_ok && interior_ok && wall_ok;
    report(
        8,
        "parallel equivalence",
        pass,
        &format!(
            "1-chunk identical: {single_ok}; 4-chunk interior identical: {interior_ok}; \
             workers=4 {t4:.2}s vs workers=1 {t1:.2}s on {} cpu(s)",
            std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1)
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_9_invariant_suite() {
    let mut fixtures: Vec<(String, TimeSeriesPair)> = Vec::new();
    for kind in [RelationKind::Linear, RelationKind::Sine, RelationKind::Independent] {
        let pair = generate_relation(&RelationSpec::canonical(kind, 1000, 0.2, 3)).unwrap();
        fixtures.push((kind.name().to_string(), pair));
    }
    for seed in [1u64, 2, 3] {
        let spec = ScenarioSpec::evenly_spaced(2000, 2, 400, RelationKind::Quadratic, 0.2, seed);
        fixtures.push((format!("scenario-{seed}"), generate_scenario(&spec).unwrap().0));
    }

    let mut violations = Vec::new();
    for (name, pair) in &fixtures {
        let params = SearchParams { seed: 77, ..SearchParams::default() };
        let schedule = LayerSchedule::geometric(params.s_max, params.s_min).unwrap();
        let runs = [
            ("td", run_td(pair, &params, &schedule, SearchOptions::default()).unwrap().0),
            ("bu", run_bu(pair, &params, SearchOptions::default()).unwrap().0),
        ];
        for (tag, res) in &runs {
            let mut prev_end = 0usize;
            for cw in res.iter() {
                if cw.window.start < prev_end {
                    violations.push(format!("{name}/{tag}: overlap at {}", cw.window));
                }
                prev_end = cw.window.end;
                if cw.window.size() < params.s_min || cw.window.size() > params.s_max {
                    violations.push(format!("{name}/{tag}: size bound at {}", cw.window));
                }
                let scr = estimate_mi(&pair.slice(cw.window).unwrap(), params.k).unwrap();
                if scr.normalized < params.sigma {
                    violations.push(format!(
                        "{name}/{tag}: {} fails threshold from scratch ({:.3})",
                        cw.window, scr.normalized
                    ));
                }
            }
        }
        // Determinism: bit-identical reruns.
        let (td2, _) = run_td(pair, &params, &schedule, SearchOptions::default()).unwrap();
        let (bu2, _) = run_bu(pair, &params, SearchOptions::default()).unwrap();
        if td2.windows() != runs[0].1.windows() || bu2.windows() != runs[1].1.windows() {
            violations.push(format!("{name}: rerun diverged"));
        }
        // Local optimality at climb termination (pruning off so the full
        // neighborhood was in play): no candidate beats both the terminal
        // value and the best remembered value.
        let opts = SearchOptions { noise_pruning: false, incremental: true };
        let (_, _, traces) = run_bu_traced(pair, &params, opts).unwrap();
        for state in traces {
            let bar = state
                .current_mi
                .max(state.history.iter().cloned().fold(f64::MIN, f64::max));
            let cands = neighborhood(
                state.current,
                params.delta_bu_value(),
                pair.len(),
                &params,
                state.region_start,
                &DirectionStreaks::default(),
            );
            for cand in cands {
                let est = estimate_mi(&pair.slice(cand).unwrap(), params.k).unwrap();
                if est.normalized > bar + 1e-9 {
                    violations.push(format!(
                        "{name}: candidate {cand} ({:.4}) beats terminal {} ({bar:.4})",
                        est.normalized, state.current
                    ));
                }
            }
        }
    }
    let pass = violations.is_empty();
    report(
        9,
        "invariant suite",
        pass,
        &format!("{} fixtures; violations: [{}]", fixtures.len(), violations.join("; ")),
    );
    assert!(pass);
}
