//! Thin command-line front end over the library.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sycos::datagen::{generate_relation, generate_scenario, RelationKind, RelationSpec, ScenarioSpec};
use sycos::io::{ingest, write_pair_csv, ColumnSpec, IngestSpec, WindowReport};
use sycos::parallel::{run_method, run_parallel, Method};
use sycos::selector::select;
use sycos::types::{MethodTag, SearchOptions, SearchParams};
use sycos::Error;

#[derive(Parser)]
#[command(name = "sycos", version, about = "Find correlated time windows between two series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search a pair of series for correlated windows.
    Search(SearchArgs),
    /// Emit synthetic fixture data as CSV.
    Generate(GenerateArgs),
    /// Run the search with and without noise pruning and compare the work.
    Bench(BenchArgs),
    /// Profile both searches on sampled partitions and report the choice.
    Select(SelectArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Td,
    Bu,
    Auto,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct InputArgs {
    /// Single CSV holding both series.
    #[arg(long, conflicts_with_all = ["x_file", "y_file"])]
    input: Option<PathBuf>,
    /// Column names inside --input.
    #[arg(long, default_value = "x")]
    x_column: String,
    #[arg(long, default_value = "y")]
    y_column: String,
    /// Separate per-series CSVs (column via --value-column).
    #[arg(long, requires = "y_file")]
    x_file: Option<PathBuf>,
    #[arg(long, requires = "x_file")]
    y_file: Option<PathBuf>,
    #[arg(long, default_value = "value")]
    value_column: String,
    /// Join / aggregation key column, present in every input file.
    #[arg(long)]
    timestamp_column: Option<String>,
    /// Mean-aggregate to this resolution (timestamp units, or rows).
    #[arg(long)]
    aggregate: Option<u64>,
}

impl InputArgs {
    fn to_spec(&self, seed: u64) -> Result<IngestSpec, Error> {
        let (x, y) = match (&self.input, &self.x_file, &self.y_file) {
            (Some(path), None, None) => (
                ColumnSpec {
                    path: path.clone(),
                    value_column: self.x_column.clone(),
                    timestamp_column: self.timestamp_column.clone(),
                },
                ColumnSpec {
                    path: path.clone(),
                    value_column: self.y_column.clone(),
                    timestamp_column: self.timestamp_column.clone(),
                },
            ),
            (None, Some(xf), Some(yf)) => (
                ColumnSpec {
                    path: xf.clone(),
                    value_column: self.value_column.clone(),
                    timestamp_column: self.timestamp_column.clone(),
                },
                ColumnSpec {
                    path: yf.clone(),
                    value_column: self.value_column.clone(),
                    timestamp_column: self.timestamp_column.clone(),
                },
            ),
            _ => {
                return Err(Error::Config(
                    "provide either --input or both --x-file and --y-file".into(),
                ))
            }
        };
        Ok(IngestSpec { x, y, aggregate: self.aggregate, jitter_seed: seed })
    }
}

#[derive(Args)]
struct ParamArgs {
    /// Acceptance threshold on normalized MI.
    #[arg(long, default_value_t = 0.2)]
    sigma: f64,
    /// Noise threshold as a fraction of sigma.
    #[arg(long, default_value_t = 0.25)]
    tau_ratio: f64,
    /// Sliding/neighbor step; default derives from the window size.
    #[arg(long)]
    delta: Option<usize>,
    #[arg(long, default_value_t = 30)]
    smin: usize,
    #[arg(long, default_value_t = 500)]
    smax: usize,
    /// Estimator neighbor count.
    #[arg(long, default_value_t = 4)]
    k: usize,
    /// Tolerated consecutive non-improving climb iterations.
    #[arg(long, default_value_t = 3)]
    max_idle: usize,
    /// Climb memory length.
    #[arg(long, default_value_t = 5)]
    history: usize,
    /// Consecutive noise verdicts before pruning triggers.
    #[arg(long, default_value_t = 3)]
    p: usize,
    /// Runtime weight in the method-selection score.
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Small/large window cut as a fraction of smax.
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
    /// Partitions sampled for method selection.
    #[arg(long, default_value_t = 6)]
    m: usize,
    /// Total partitions the series is cut into for selection.
    #[arg(long, default_value_t = 20)]
    big_m: usize,
    #[arg(long, env = "SYCOS_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    no_noise_pruning: bool,
    #[arg(long)]
    no_incremental: bool,
}

impl ParamArgs {
    fn to_params(&self) -> SearchParams {
        SearchParams {
            sigma: self.sigma,
            tau_ratio: self.tau_ratio,
            delta_td: self.delta,
            delta_bu: self.delta,
            s_min: self.smin,
            s_max: self.smax,
            k: self.k,
            t_max_idle: self.max_idle,
            h: self.history,
            p: self.p,
            alpha: self.alpha,
            rho: self.rho,
            m: self.m,
            big_m: self.big_m,
            seed: self.seed,
        }
    }

    fn to_options(&self) -> SearchOptions {
        SearchOptions {
            noise_pruning: !self.no_noise_pruning,
            incremental: !self.no_incremental,
        }
    }
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
    /// Overlapping chunks to split the series into.
    #[arg(long, default_value_t = 1)]
    chunks: usize,
    /// Worker threads processing the chunks.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct GenerateArgs {
    /// One relation family over its whole range.
    #[arg(long, conflicts_with = "scenario")]
    relation: Option<String>,
    /// Blocks of this family spliced into independent noise.
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    blocks: usize,
    #[arg(long, default_value_t = 200)]
    block_length: usize,
    #[arg(long, default_value_t = 0.2)]
    noise: f64,
    #[arg(long, env = "SYCOS_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where to write the ground-truth block list (scenario only).
    #[arg(long)]
    truth_out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Td)]
    method: MethodArg,
}

#[derive(Args)]
struct SelectArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    params: ParamArgs,
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Search(args) => run_search(args),
        Command::Generate(args) => run_generate(args),
        Command::Bench(args) => run_bench(args),
        Command::Select(args) => run_select(args),
    };
    if let Err(e) = outcome {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn write_output(content: &str, out: Option<&PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => emit(content)?,
    }
    Ok(())
}

/// Prints to stdout, treating a closed pipe (e.g. `| head`) as a clean stop.
fn emit(content: &str) -> Result<(), Error> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let done = out
        .write_all(content.as_bytes())
        .and_then(|()| out.write_all(b"\n"));
    match done {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
        other => Ok(other?),
    }
}

fn run_search(args: SearchArgs) -> Result<(), Error> {
    let params = args.params.to_params();
    let pair = ingest(&args.input.to_spec(params.seed)?)?;
    let method = match args.method {
        MethodArg::Td => Method::TD,
        MethodArg::Bu => Method::BU,
        MethodArg::Auto => Method::Auto,
    };
    let outcome = run_parallel(
        &pair,
        &params,
        method,
        args.chunks,
        args.workers,
        args.params.to_options(),
    )?;
    let mut stats = sycos::types::SearchStats::default();
    for report in &outcome.chunk_reports {
        stats.merge(&report.stats);
    }
    let report = WindowReport::new(&outcome.results, &pair, &params, stats);
    let content = match args.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv()?,
    };
    write_output(&content, args.out.as_ref())
}

fn run_generate(args: GenerateArgs) -> Result<(), Error> {
    let pair = match (&args.relation, &args.scenario) {
        (Some(name), None) => {
            let kind = RelationKind::parse(name)?;
            generate_relation(&RelationSpec::canonical(kind, args.n, args.noise, args.seed))?
        }
        (None, Some(name)) => {
            let kind = RelationKind::parse(name)?;
            let spec = ScenarioSpec::evenly_spaced(
                args.n,
                args.blocks,
                args.block_length,
                kind,
                args.noise,
                args.seed,
            );
            let (pair, truth) = generate_scenario(&spec)?;
            if let Some(path) = &args.truth_out {
                std::fs::write(path, serde_json::to_string_pretty(&truth).expect("serializes"))?;
            }
            pair
        }
        _ => {
            return Err(Error::Config(
                "provide exactly one of --relation or --scenario".into(),
            ))
        }
    };
    match &args.out {
        Some(path) => write_pair_csv(&pair, std::fs::File::create(path)?)?,
        None => {
            let mut buf = Vec::new();
            write_pair_csv(&pair, &mut buf)?;
            emit(String::from_utf8_lossy(&buf).trim_end())?;
        }
    }
    Ok(())
}

fn run_bench(args: BenchArgs) -> Result<(), Error> {
    let params = args.params.to_params();
    let pair = ingest(&args.input.to_spec(params.seed)?)?;
    let tag = match args.method {
        MethodArg::Td => MethodTag::TD,
        MethodArg::Bu => MethodTag::BU,
        MethodArg::Auto => select(&pair, &params)?.chosen,
    };
    let base_options = args.params.to_options();
    let pruned = run_method(&pair, &params, tag, SearchOptions { noise_pruning: true, ..base_options })?;
    let unpruned =
        run_method(&pair, &params, tag, SearchOptions { noise_pruning: false, ..base_options })?;
    let overlap: usize = pruned
        .0
        .iter()
        .map(|a| {
            unpruned
                .0
                .iter()
                .filter_map(|b| a.window.intersect(&b.window).map(|w| w.size()))
                .sum::<usize>()
        })
        .sum();
    let denom = unpruned.0.covered_samples().max(1);
    let report = serde_json::json!({
        "method": format!("{tag:?}"),
        "pruned": { "stats": pruned.1, "windows": pruned.0.len(),
                     "covered_samples": pruned.0.covered_samples() },
        "unpruned": { "stats": unpruned.1, "windows": unpruned.0.len(),
                       "covered_samples": unpruned.0.covered_samples() },
        "overlap_fraction": overlap as f64 / denom as f64,
    });
    emit(&serde_json::to_string_pretty(&report).expect("serializes"))?;
    Ok(())
}

fn run_select(args: SelectArgs) -> Result<(), Error> {
    let params = args.params.to_params();
    let pair = ingest(&args.input.to_spec(params.seed)?)?;
    let report = select(&pair, &params)?;
    emit(&serde_json::to_string_pretty(&report).expect("serializes"))?;
    Ok(())
}
