//! Round trip through the file formats: generate a fixture, write it as CSV,
//! ingest it back, search, and serialize the findings as JSON and CSV.

use sycos::datagen::{generate_scenario, RelationKind, ScenarioSpec};
use sycos::io::{ingest, write_pair_csv, ColumnSpec, IngestSpec, WindowReport};
use sycos::parallel::run_method;
use sycos::types::{MethodTag, SearchOptions, SearchParams};

fn main() -> sycos::Result<()> {
    let dir = std::env::temp_dir();
    let csv_path = dir.join("sycos_example_pair.csv");

    let spec = ScenarioSpec::evenly_spaced(2000, 2, 300, RelationKind::Cross, 0.2, 31);
    let (pair, _) = generate_scenario(&spec)?;
    write_pair_csv(&pair, std::fs::File::create(&csv_path)?)?;
    println!("wrote {} rows to {}", pair.len(), csv_path.display());

    let column = |name: &str| ColumnSpec {
        path: csv_path.clone(),
        value_column: name.into(),
        timestamp_column: Some("t".into()),
    };
    let ingested = ingest(&IngestSpec {
        x: column("x"),
        y: column("y"),
        aggregate: None,
        jitter_seed: 0,
    })?;

    let params = SearchParams { s_min: 30, s_max: 500, ..Default::default() };
    let (results, stats) = run_method(&ingested, &params, MethodTag::BU, SearchOptions::default())?;

    let report = WindowReport::new(&results, &ingested, &params, stats);
    println!("\nas JSON:\n{}", report.to_json());
    println!("\nas CSV:\n{}", report.to_csv()?);
    Ok(())
}
