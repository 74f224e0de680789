//! Command-line front end over the core library: generate datasets and
//! workloads, build and query snapshots, validate indexes against the
//! linear-scan oracle, and run timed benchmarks with SVG plots.

use std::error::Error;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rovi_core::bench::{self, BenchConfig, BenchReport, SweepAxis, SweepReport};
use rovi_core::dataset;
use rovi_core::oracle::validate_with;
use rovi_core::{
    generate_dataset, generate_workload, IndexKind, QivIndex, QivParams, RoviQuery, RoviSearcher,
    UserStore, VisualVocabulary, WorkloadSpec,
};

type CliError = Box<dyn Error>;
type CliResult<T = ()> = Result<T, CliError>;

/// Region-of-visual-interests query tooling.
#[derive(Parser)]
#[command(name = "rovi", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset: user and vocabulary JSONL files.
    GenData(GenDataArgs),
    /// Generate a query workload over an existing dataset.
    GenQueries(GenQueriesArgs),
    /// Build an index from a dataset and save it to disk.
    Build(BuildArgs),
    /// Answer a single query from a saved index.
    Query(QueryArgs),
    /// Build indexes and compare their answers against the oracle.
    Validate(ValidateArgs),
    /// Time builds and queries over generated workloads.
    Bench(BenchArgs),
}

/// Workload knobs shared by the generating commands; a JSON spec file sets
/// the baseline and individual flags override single fields.
#[derive(Args, Clone)]
struct SpecArgs {
    /// Workload spec as JSON; omitted fields take their defaults.
    #[arg(long, value_name = "FILE")]
    spec: Option<PathBuf>,
    /// Number of users to generate.
    #[arg(long)]
    users: Option<usize>,
    /// Vocabulary size.
    #[arg(long)]
    vocab_size: Option<u32>,
    /// Number of queries to generate.
    #[arg(long)]
    queries: Option<usize>,
    /// Words sampled per query.
    #[arg(long)]
    query_words: Option<usize>,
    /// Query area as a fraction of the unit space.
    #[arg(long)]
    fraction: Option<f64>,
    /// Geographic similarity threshold.
    #[arg(long)]
    gamma_g: Option<f64>,
    /// Visual similarity threshold.
    #[arg(long)]
    gamma_v: Option<f64>,
}

impl SpecArgs {
    fn resolve(&self) -> CliResult<WorkloadSpec> {
        let mut spec: WorkloadSpec = match &self.spec {
            Some(path) => serde_json::from_str(&fs::read_to_string(data_path(path))?)?,
            None => WorkloadSpec::default(),
        };
        if let Some(v) = self.users {
            spec.n_users = v;
        }
        if let Some(v) = self.vocab_size {
            spec.vocab_size = v;
        }
        if let Some(v) = self.queries {
            spec.n_queries = v;
        }
        if let Some(v) = self.query_words {
            spec.n_query_words = v;
        }
        if let Some(v) = self.fraction {
            spec.query_region_fraction = v;
        }
        if let Some(v) = self.gamma_g {
            spec.gamma_g = v;
        }
        if let Some(v) = self.gamma_v {
            spec.gamma_v = v;
        }
        Ok(spec)
    }
}

/// Quadtree shape knobs for the QIV index.
#[derive(Args, Clone, Copy)]
struct QivArgs {
    /// Deepest quadtree split level.
    #[arg(long, default_value_t = QivParams::default().max_level)]
    max_level: u8,
    /// Residents a leaf may hold before splitting.
    #[arg(long, default_value_t = QivParams::default().leaf_capacity)]
    leaf_capacity: usize,
}

impl QivArgs {
    fn params(self) -> QivParams {
        QivParams { max_level: self.max_level, leaf_capacity: self.leaf_capacity }
    }
}

/// Leaf pruning rule for the spatial-first index.
#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SfiPrune {
    /// Safe bound: intersection area over query area.
    UpperBound,
    /// Leaf-MBR similarity check; lossy, kept for comparison runs.
    MbrScore,
}

#[derive(Args)]
struct GenDataArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// RNG seed; the same seed reproduces the same files byte for byte.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output path for the user JSONL file.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Output path for the vocabulary JSONL file.
    #[arg(long, value_name = "FILE")]
    vocab: PathBuf,
}

#[derive(Args)]
struct GenQueriesArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// User JSONL file the query regions anchor to.
    #[arg(long, value_name = "FILE")]
    data: PathBuf,
    /// Vocabulary JSONL file; sizes the query word draw to the real
    /// vocabulary instead of the spec's.
    #[arg(long, value_name = "FILE")]
    vocab: Option<PathBuf>,
    /// RNG seed; independent of the dataset stream under the same seed.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output path for the query JSONL file.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct BuildArgs {
    /// Index to build: qiv, di, vfi or sfi.
    #[arg(long)]
    index: String,
    /// User JSONL file.
    #[arg(long, value_name = "FILE")]
    data: PathBuf,
    /// Vocabulary JSONL file.
    #[arg(long, value_name = "FILE")]
    vocab: PathBuf,
    /// Snapshot output path.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    #[command(flatten)]
    qiv: QivArgs,
}

#[derive(Args)]
struct QueryArgs {
    /// Saved QIV index file.
    #[arg(long, value_name = "FILE")]
    index_file: PathBuf,
    /// One JSON object: {"mbr":[x1,y1,x2,y2],"words":[..],"gamma_g":..,"gamma_v":..}.
    #[arg(long)]
    query: String,
}

#[derive(Args)]
struct ValidateArgs {
    /// User JSONL file.
    #[arg(long, value_name = "FILE")]
    data: PathBuf,
    /// Vocabulary JSONL file.
    #[arg(long, value_name = "FILE")]
    vocab: PathBuf,
    /// Query JSONL file.
    #[arg(long, value_name = "FILE")]
    queries: PathBuf,
    /// Comma-separated index names: qiv, di, vfi, sfi, sfi-mbr.
    #[arg(long, value_delimiter = ',', default_value = "qiv,di,vfi,sfi")]
    indexes: Vec<String>,
    /// Pruning rule applied wherever sfi is requested.
    #[arg(long, value_enum, default_value_t = SfiPrune::UpperBound)]
    sfi_prune: SfiPrune,
    #[command(flatten)]
    qiv: QivArgs,
    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(subcommand)]
    action: Option<BenchAction>,
    #[command(flatten)]
    run: BenchRunArgs,
}

#[derive(Subcommand)]
enum BenchAction {
    /// Draw response-time curves from a saved report.
    Plot(PlotArgs),
}

#[derive(Args)]
struct BenchRunArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Vary one axis over five points, holding the rest at the spec:
    /// size, words, gamma-g, gamma-v or region.
    #[arg(long, value_name = "AXIS", value_parser = SweepAxis::from_str)]
    sweep: Option<SweepAxis>,
    /// RNG seed for dataset and workload generation.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Comma-separated index names to time.
    #[arg(long, value_delimiter = ',', default_value = "qiv,di,vfi,sfi")]
    indexes: Vec<String>,
    /// Untimed passes over the workload before measuring.
    #[arg(long, default_value_t = BenchConfig::default().warmup)]
    warmup: usize,
    /// Timed passes per query.
    #[arg(long, default_value_t = BenchConfig::default().repeats)]
    repeats: usize,
    /// Also time the linear-scan oracle as the no-index yardstick.
    #[arg(long)]
    with_oracle: bool,
    /// Skip the oracle cross-check that normally precedes timing.
    #[arg(long)]
    skip_validate: bool,
    /// Pruning rule applied wherever sfi is requested.
    #[arg(long, value_enum, default_value_t = SfiPrune::UpperBound)]
    sfi_prune: SfiPrune,
    #[command(flatten)]
    qiv: QivArgs,
    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    /// Report JSON produced by `rovi bench`.
    #[arg(long, value_name = "FILE")]
    report: PathBuf,
    /// Output SVG path.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::GenData(args) => gen_data(args),
        Command::GenQueries(args) => gen_queries(args),
        Command::Build(args) => build(args),
        Command::Query(args) => query(args),
        Command::Validate(args) => validate(args),
        Command::Bench(args) => match args.action {
            Some(BenchAction::Plot(plot_args)) => plot(plot_args),
            None => bench_run(args.run),
        },
    }
}

/// Relative paths resolve against ROVI_DATA_DIR when it is set.
fn data_path(path: &Path) -> PathBuf {
    match std::env::var_os("ROVI_DATA_DIR") {
        Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn parse_kinds(names: &[String], rule: SfiPrune) -> CliResult<Vec<IndexKind>> {
    let mut kinds = Vec::new();
    for name in names {
        let mut kind: IndexKind = name.parse()?;
        if kind == IndexKind::SpatialFirst && rule == SfiPrune::MbrScore {
            kind = IndexKind::SpatialFirstMbr;
        }
        kinds.push(kind);
    }
    Ok(kinds)
}

/// Builds every requested index, naming the failing one on error.
fn build_searchers(
    kinds: &[IndexKind],
    users: &Arc<UserStore>,
    vocab: &Arc<VisualVocabulary>,
    params: QivParams,
) -> CliResult<Vec<Box<dyn RoviSearcher>>> {
    kinds
        .iter()
        .map(|kind| {
            kind.build(users.clone(), vocab.clone(), params)
                .map_err(|e| format!("building {kind} failed: {e}").into())
        })
        .collect()
}

/// Query words are Zipf-sampled over ids `0..n`, so a vocabulary used for
/// generation must cover exactly that id range.
fn contiguous_size(vocab: &VisualVocabulary) -> CliResult<u32> {
    let n = u32::try_from(vocab.len()).map_err(|_| "vocabulary too large")?;
    // Distinct ids with maximum n-1 are exactly {0, .., n-1}.
    if n == 0 || vocab.sorted_entries().last().map(|&(w, _)| w) != Some(n - 1) {
        return Err("query generation draws word ids 0..n; \
                    the vocabulary must cover exactly that range"
            .into());
    }
    Ok(n)
}

/// Every query word must resolve in the vocabulary before similarity runs.
fn check_query_words(queries: &[RoviQuery], vocab: &VisualVocabulary) -> CliResult {
    for (i, q) in queries.iter().enumerate() {
        vocab
            .validate_words(q.words.as_slice().iter())
            .map_err(|e| format!("query {}: {e}", i + 1))?;
    }
    Ok(())
}

/// Writes `json` to `path`, or to stdout when no path was given.
fn emit(path: Option<&Path>, json: &str) -> CliResult {
    match path {
        Some(path) => Ok(fs::write(data_path(path), json)?),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn gen_data(args: GenDataArgs) -> CliResult {
    let spec = args.spec.resolve()?;
    let (users, vocab) = generate_dataset(&spec, args.seed)?;
    let users_path = data_path(&args.out);
    let vocab_path = data_path(&args.vocab);
    dataset::write_users(&users_path, &users)?;
    dataset::write_vocabulary(&vocab_path, &vocab)?;
    eprintln!(
        "wrote {} users to {} and {} words to {}",
        users.len(),
        users_path.display(),
        vocab.len(),
        vocab_path.display()
    );
    Ok(())
}

fn gen_queries(args: GenQueriesArgs) -> CliResult {
    let mut spec = args.spec.resolve()?;
    if let Some(vocab_path) = &args.vocab {
        let vocab = dataset::read_vocabulary(&data_path(vocab_path))?;
        spec.vocab_size = contiguous_size(&vocab)?;
    }
    let users = dataset::read_users(&data_path(&args.data))?;
    let queries = generate_workload(&spec, &users, args.seed)?;
    let out = data_path(&args.out);
    dataset::write_queries(&out, &queries)?;
    eprintln!("wrote {} queries to {}", queries.len(), out.display());
    Ok(())
}

fn build(args: BuildArgs) -> CliResult {
    let kind: IndexKind = args.index.parse()?;
    if kind != IndexKind::Qiv {
        return Err(format!(
            "{kind} has no snapshot format; baselines are rebuilt from the dataset where needed"
        )
        .into());
    }
    let users = Arc::new(dataset::read_users(&data_path(&args.data))?);
    let vocab = Arc::new(dataset::read_vocabulary(&data_path(&args.vocab))?);
    let index = QivIndex::build(users, vocab, args.qiv.params())?;
    let out = data_path(&args.out);
    index.save(&out)?;
    eprintln!("saved qiv index to {}", out.display());
    Ok(())
}

fn query(args: QueryArgs) -> CliResult {
    let index = QivIndex::load(&data_path(&args.index_file))?;
    let query = dataset::parse_query(&args.query)?;
    check_query_words(std::slice::from_ref(&query), index.vocab())?;
    let result = index.search(&query);
    println!("{}", serde_json::json!({ "count": result.len(), "ids": result.ids() }));
    Ok(())
}

fn validate(args: ValidateArgs) -> CliResult {
    let users = Arc::new(dataset::read_users(&data_path(&args.data))?);
    let vocab = Arc::new(dataset::read_vocabulary(&data_path(&args.vocab))?);
    let queries = dataset::read_queries(&data_path(&args.queries))?;
    check_query_words(&queries, &vocab)?;
    let kinds = parse_kinds(&args.indexes, args.sfi_prune)?;
    let searchers = build_searchers(&kinds, &users, &vocab, args.qiv.params())?;
    let report = validate_with(&users, &vocab, &queries, &searchers);
    emit(args.report.as_deref(), &serde_json::to_string_pretty(&report)?)?;
    if report.all_match {
        eprintln!(
            "all {} indexes matched the oracle on {} queries over {} users",
            report.indexes.len(),
            report.n_queries,
            report.n_users
        );
        Ok(())
    } else {
        Err(format!(
            "{} of {} queries had a mismatching index; see the report for details",
            report.failures().count(),
            report.n_queries
        )
        .into())
    }
}

/// Cross-checks every requested index against the oracle on a reduced
/// instance, so benchmark numbers never come from a wrong index.
fn precheck(spec: &WorkloadSpec, seed: u64, kinds: &[IndexKind], params: QivParams) -> CliResult {
    let mut small = spec.clone();
    small.n_users = spec.n_users.min(2_000);
    let (users, vocab) = generate_dataset(&small, seed)?;
    let queries = generate_workload(&small, &users, seed)?;
    let searchers = build_searchers(kinds, &users, &vocab, params)?;
    let report = validate_with(&users, &vocab, &queries, &searchers);
    if !report.all_match {
        return Err(format!(
            "pre-run validation failed on {} of {} queries; run `rovi validate` for the full \
             report or pass --skip-validate",
            report.failures().count(),
            report.n_queries
        )
        .into());
    }
    eprintln!(
        "validation passed: {} indexes over {} queries on {} users",
        report.indexes.len(),
        report.n_queries,
        report.n_users
    );
    Ok(())
}

fn bench_run(args: BenchRunArgs) -> CliResult {
    let spec = args.spec.resolve()?;
    let kinds = parse_kinds(&args.indexes, args.sfi_prune)?;
    let params = args.qiv.params();
    let config = BenchConfig {
        warmup: args.warmup,
        repeats: args.repeats,
        include_oracle: args.with_oracle,
    };
    if !args.skip_validate {
        precheck(&spec, args.seed, &kinds, params)?;
    }
    let json = match args.sweep {
        Some(axis) => {
            let report = bench::run_sweep(axis, &spec, args.seed, &kinds, params, &config)?;
            for point in &report.points {
                eprintln!("-- {} = {}", report.axis, point.value);
                summarize(&point.report);
            }
            serde_json::to_string_pretty(&report)?
        }
        None => {
            let (users, vocab) = generate_dataset(&spec, args.seed)?;
            let queries = generate_workload(&spec, &users, args.seed)?;
            let report = bench::run_bench(&users, &vocab, &queries, &kinds, params, &config)?;
            summarize(&report);
            serde_json::to_string_pretty(&report)?
        }
    };
    emit(args.report.as_deref(), &json)
}

fn summarize(report: &BenchReport) {
    eprintln!(
        "{} users, {} queries, warmup {}, repeats {}",
        report.n_users, report.n_queries, report.config.warmup, report.config.repeats
    );
    if let Some(warning) = &report.env.timer_warning {
        eprintln!("note: {warning}");
    }
    eprintln!(
        "{:<10} {:>12} {:>12} {:>12} {:>12}",
        "index", "build ms", "mean ms", "median ms", "p95 ms"
    );
    for ib in &report.indexes {
        eprintln!(
            "{:<10} {:>12.3} {:>12.4} {:>12.4} {:>12.4}",
            ib.index, ib.build_ms, ib.mean_query_ms, ib.median_query_ms, ib.p95_query_ms
        );
    }
}

fn plot(args: PlotArgs) -> CliResult {
    let text = fs::read_to_string(data_path(&args.report))?;
    let (axis_label, series) = if let Ok(sweep) = serde_json::from_str::<SweepReport>(&text) {
        (sweep.axis.to_string(), sweep_series(&sweep))
    } else {
        let report: BenchReport =
            serde_json::from_str(&text).map_err(|e| format!("not a bench or sweep report: {e}"))?;
        let series = report
            .indexes
            .iter()
            .map(|ib| (ib.index.clone(), vec![(0.0, ib.mean_query_ms)]))
            .collect();
        ("run".to_owned(), series)
    };
    if series.is_empty() {
        return Err("report holds no index timings to plot".into());
    }
    let out = data_path(&args.out);
    fs::write(&out, render_svg(&axis_label, &series))?;
    eprintln!("wrote {}", out.display());
    Ok(())
}

/// Mean query time per index, one series point per sweep value.
fn sweep_series(sweep: &SweepReport) -> Vec<(String, Vec<(f64, f64)>)> {
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for point in &sweep.points {
        for ib in &point.report.indexes {
            let entry = match series.iter_mut().find(|(name, _)| name == &ib.index) {
                Some(entry) => entry,
                None => {
                    series.push((ib.index.clone(), Vec::new()));
                    series.last_mut().expect("just pushed")
                }
            };
            entry.1.push((point.value, ib.mean_query_ms));
        }
    }
    series
}

fn fmt_tick(v: f64) -> String {
    if v >= 1000.0 {
        format!("{v:.0}")
    } else if v >= 1.0 {
        format!("{v:.1}")
    } else {
        format!("{v:.3}")
    }
}

/// Hand-rolled SVG: one polyline per index inside a framed, labelled plot.
fn render_svg(axis_label: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    const W: f64 = 760.0;
    const H: f64 = 480.0;
    // Plot area frame.
    const L: f64 = 80.0;
    const R: f64 = 620.0;
    const T: f64 = 52.0;
    const B: f64 = 420.0;
    const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

    let xs: Vec<f64> = series.iter().flat_map(|(_, pts)| pts.iter().map(|p| p.0)).collect();
    let (x_min, x_max) = bounds(&xs);
    let y_max = series
        .iter()
        .flat_map(|(_, pts)| pts.iter().map(|p| p.1))
        .fold(0.0_f64, f64::max)
        .max(1e-9);
    let sx = |x: f64| {
        if x_max > x_min {
            L + (x - x_min) / (x_max - x_min) * (R - L)
        } else {
            (L + R) / 2.0
        }
    };
    let sy = |y: f64| B - y / (y_max * 1.05) * (B - T);

    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">\
         Mean query response time vs {axis_label}</text>\n",
        (L + R) / 2.0
    );

    // Horizontal grid and y ticks.
    for i in 0..=4 {
        let y_val = y_max * 1.05 * f64::from(i) / 4.0;
        let y = sy(y_val);
        let _ = write!(
            svg,
            "<line x1=\"{L}\" y1=\"{y:.1}\" x2=\"{R}\" y2=\"{y:.1}\" stroke=\"#ddd\"/>\n\
             <text x=\"{}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>\n",
            L - 8.0,
            y + 4.0,
            fmt_tick(y_val)
        );
    }

    // X ticks at the distinct data positions (sweeps have five).
    let mut tick_xs = xs.clone();
    tick_xs.sort_by(f64::total_cmp);
    tick_xs.dedup();
    for &x_val in &tick_xs {
        let x = sx(x_val);
        let _ = write!(
            svg,
            "<line x1=\"{x:.1}\" y1=\"{B}\" x2=\"{x:.1}\" y2=\"{}\" stroke=\"#aaa\"/>\n\
             <text x=\"{x:.1}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            B + 5.0,
            B + 20.0,
            fmt_tick(x_val)
        );
    }

    // Frame and axis labels.
    let _ = write!(
        svg,
        "<rect x=\"{L}\" y=\"{T}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333\"/>\n\
         <text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{axis_label}</text>\n\
         <text x=\"20\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {})\">\
         mean query time (ms)</text>\n",
        R - L,
        B - T,
        (L + R) / 2.0,
        B + 42.0,
        (T + B) / 2.0,
        (T + B) / 2.0
    );

    for (i, (name, pts)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let path: Vec<String> =
            pts.iter().map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y))).collect();
        let _ = writeln!(
            svg,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>",
            path.join(" ")
        );
        for &(x, y) in pts {
            let _ = writeln!(
                svg,
                "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"3\" fill=\"{color}\"/>",
                sx(x),
                sy(y)
            );
        }
        // Legend row.
        let ly = T + 16.0 * i as f64 + 8.0;
        let _ = write!(
            svg,
            "<line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" \
             stroke-width=\"2\"/>\n<text x=\"{}\" y=\"{}\">{name}</text>\n",
            R + 14.0,
            R + 40.0,
            R + 46.0,
            ly + 4.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn bounds(values: &[f64]) -> (f64, f64) {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (min, max)
}
