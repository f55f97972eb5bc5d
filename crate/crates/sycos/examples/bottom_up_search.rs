//! Bottom-up search: hill climbs from minimal windows, growing them toward
//! the correlated regions. Prints each climb's terminal state.

use sycos::datagen::{generate_scenario, RelationKind, ScenarioSpec};
use sycos::run_bu_traced;
use sycos::types::{SearchOptions, SearchParams};

fn main() -> sycos::Result<()> {
    let spec = ScenarioSpec::evenly_spaced(3000, 3, 250, RelationKind::Linear, 0.3, 23);
    let (pair, truth) = generate_scenario(&spec)?;
    println!("planted blocks: {truth:?}\n");

    let params = SearchParams { s_min: 30, s_max: 600, ..Default::default() };
    let (results, stats, climbs) = run_bu_traced(&pair, &params, SearchOptions::default())?;

    println!("{} climbs ran:", climbs.len());
    for c in climbs.iter().filter(|c| c.current_mi > 0.1) {
        println!("  settled at {} with normalized mi {:.3} (idle {})", c.current, c.current_mi, c.idle);
    }
    println!("\naccepted:");
    for w in results.iter() {
        println!("  {} normalized {:.3}", w.window, w.normalized_mi);
    }
    println!(
        "\n{} MI evaluations, {} pruned directions",
        stats.mi_evaluations, stats.prune_events
    );
    Ok(())
}
