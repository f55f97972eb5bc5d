//! Top-down search over a series with two correlated blocks hidden in noise.

use sycos::datagen::{generate_scenario, RelationKind, ScenarioSpec};
use sycos::types::{SearchOptions, SearchParams};
use sycos::{run_td, LayerSchedule};

fn main() -> sycos::Result<()> {
    let spec = ScenarioSpec::evenly_spaced(4000, 2, 500, RelationKind::Sine, 0.2, 11);
    let (pair, truth) = generate_scenario(&spec)?;
    println!("planted blocks: {truth:?}\n");

    let params = SearchParams { s_min: 30, s_max: 1000, ..Default::default() };
    let schedule = LayerSchedule::geometric(params.s_max, params.s_min)?;
    let (results, stats) = run_td(&pair, &params, &schedule, SearchOptions::default())?;

    for w in results.iter() {
        println!(
            "found {} size {:>4}  mi {:.3}  normalized {:.3}",
            w.window,
            w.window.size(),
            w.mi,
            w.normalized_mi
        );
    }
    println!(
        "\n{} windows, {} MI evaluations, {} k-NN searches, {} skips",
        results.len(),
        stats.mi_evaluations,
        stats.knn_searches,
        stats.prune_events
    );
    Ok(())
}
