//! Paired run with and without noise pruning: how much work the extension
//! checks save, and how little the found windows change.

use sycos::datagen::{generate_scenario, RelationKind, ScenarioSpec};
use sycos::parallel::run_method;
use sycos::types::{MethodTag, SearchOptions, SearchParams};

fn main() -> sycos::Result<()> {
    let spec = ScenarioSpec::evenly_spaced(5000, 2, 400, RelationKind::Quadratic, 0.2, 3);
    let (pair, _) = generate_scenario(&spec)?;
    let params = SearchParams { s_min: 30, s_max: 800, ..Default::default() };

    let on = SearchOptions { noise_pruning: true, incremental: true };
    let off = SearchOptions { noise_pruning: false, incremental: true };
    let (res_on, stats_on) = run_method(&pair, &params, MethodTag::TD, on)?;
    let (res_off, stats_off) = run_method(&pair, &params, MethodTag::TD, off)?;

    // Sample overlap between the two result sets.
    let overlap: usize = res_on
        .iter()
        .flat_map(|a| res_off.iter().filter_map(|b| a.window.intersect(&b.window)))
        .map(|w| w.size())
        .sum();

    println!("pruned:   {} windows, {} MI evals, {} skips",
        res_on.len(), stats_on.mi_evaluations, stats_on.prune_events);
    println!("unpruned: {} windows, {} MI evals",
        res_off.len(), stats_off.mi_evaluations);
    println!(
        "agreement: {overlap} of {} correlated samples re-found ({:.0}%)",
        res_off.covered_samples(),
        100.0 * overlap as f64 / res_off.covered_samples().max(1) as f64
    );
    Ok(())
}
