//! Automatic method choice on two opposite workloads: few large correlated
//! regions (top-down territory) versus many small ones (bottom-up territory).

use sycos::datagen::{generate_scenario, RelationKind, ScenarioSpec};
use sycos::select;
use sycos::types::SearchParams;

fn main() -> sycos::Result<()> {
    let dense = ScenarioSpec::evenly_spaced(4000, 3, 800, RelationKind::Linear, 0.3, 1);
    let sparse = ScenarioSpec::evenly_spaced(6000, 5, 60, RelationKind::Linear, 0.3, 1);

    // Sampled partitions must be long enough to host "large" windows, or the
    // window-shape term cannot distinguish the methods.
    for (name, spec, s_max, big_m) in
        [("dense-large", dense, 500, 8), ("sparse-small", sparse, 500, 20)]
    {
        let (pair, _) = generate_scenario(&spec)?;
        let params = SearchParams { s_min: 30, s_max, big_m, ..Default::default() };
        let report = select(&pair, &params)?;
        println!("{name}: chose {:?}", report.chosen);
        println!(
            "  scores td {:.3} / bu {:.3}; avg runtimes {:.1} ms / {:.1} ms; \
             large-td {} small-bu {}",
            report.nscore_td,
            report.nscore_bu,
            report.stats.avg_runtime_td * 1e3,
            report.stats.avg_runtime_bu * 1e3,
            report.stats.n_large_td,
            report.stats.n_small_bu,
        );
    }
    Ok(())
}
