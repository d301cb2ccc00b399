//! Command-line front end: `detect`, `evaluate`, `stats` and `benchmark`
//! subcommands. All file I/O lives here; the engine itself never touches
//! the filesystem.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::cover::{read_community_sets, Cover, PostProcess};
use crate::engine::{self, RunConfig};
use crate::error::Error;
use crate::evaluate;
use crate::graph::{read_graph, Graph};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISSING_INPUT: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_IO: i32 = 74;

/// Environment variable that overrides the detect worker count, so shared CI
/// machines can cap parallelism without touching invocations.
pub const WORKERS_ENV: &str = "OWCC_WORKERS";

#[derive(Parser)]
#[command(
    name = "owcc",
    version,
    about = "Overlapping community detection on undirected graphs, driven by a triangle-density score"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect communities in an edge list and write the cover plus a trace
    Detect(DetectArgs),
    /// Score a detected cover against a ground-truth cover
    Evaluate(EvaluateArgs),
    /// Print descriptive statistics of a cover file
    Stats(StatsArgs),
    /// Time detection runs across a list of worker counts
    Benchmark(BenchmarkArgs),
}

#[derive(Args)]
struct DetectArgs {
    /// Edge-list input: one "u v" pair per line, '#' comments ignored
    #[arg(long)]
    input: PathBuf,
    /// Directory receiving communities.txt and trace.tsv
    #[arg(long)]
    output_dir: PathBuf,
    /// Nodes per batch; 1 is fully sequential. Defaults to the worker count
    #[arg(long)]
    queue_size: Option<usize>,
    /// Worker threads; defaults to the available hardware parallelism
    #[arg(long)]
    workers: Option<usize>,
    /// Relative improvement below which the run stops
    #[arg(long, default_value_t = 0.01)]
    wcc_threshold: f64,
    #[arg(long, default_value_t = 100)]
    max_iterations: usize,
    /// Start from this cover file instead of the greedy initial clustering
    #[arg(long)]
    initial_cover: Option<PathBuf>,
    /// Write iter_<k>.txt into the output directory after every iteration
    #[arg(long)]
    dump_iterations: bool,
    /// Final-cover cleanup: none, dedupe or nested
    #[arg(long, default_value = "none")]
    post_process: PostProcess,
}

#[derive(Args)]
#[command(group(
    clap::ArgGroup::new("universe").required(true).args(["nodes", "graph"])
))]
struct EvaluateArgs {
    /// Detected cover file
    #[arg(long)]
    input: PathBuf,
    /// Ground-truth cover file
    #[arg(long)]
    truth: PathBuf,
    /// Node universe size (IDs 0..N-1) when no graph is given
    #[arg(long)]
    nodes: Option<usize>,
    /// Edge list defining the node universe
    #[arg(long)]
    graph: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    /// Cover file
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// Edge-list input file
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated worker counts, e.g. "1,2,4"; the first is the baseline
    #[arg(long)]
    workers: String,
    /// Pin the queue size across rows; defaults to queue = workers per row
    #[arg(long)]
    queue_size: Option<usize>,
    #[arg(long, default_value_t = 0.01)]
    wcc_threshold: f64,
    #[arg(long, default_value_t = 100)]
    max_iterations: usize,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        let code = match &error {
            Error::Config(_) => EXIT_USAGE,
            Error::Io(_) => EXIT_IO,
            _ => EXIT_DATA,
        };
        Failure::new(code, error.to_string())
    }
}

/// Parse arguments and dispatch; returns the process exit code.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Detect(args) => detect(args),
        Command::Evaluate(args) => evaluate_covers(args),
        Command::Stats(args) => stats(args),
        Command::Benchmark(args) => benchmark(args),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(failure) => {
            eprintln!("owcc: {}", failure.message);
            failure.code
        }
    }
}

fn open_input(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path).map(BufReader::new).map_err(|e| {
        Failure::new(
            EXIT_MISSING_INPUT,
            format!("cannot read {}: {e}", path.display()),
        )
    })
}

fn load_graph(path: &Path) -> Result<Graph, Failure> {
    let reader = open_input(path)?;
    read_graph(reader).map_err(Failure::from)
}

fn detect_workers(flag: Option<usize>) -> Result<usize, Failure> {
    if let Ok(value) = std::env::var(WORKERS_ENV) {
        let workers = value.parse::<usize>().map_err(|_| {
            Failure::new(
                EXIT_USAGE,
                format!("{WORKERS_ENV}={value:?} is not a worker count"),
            )
        })?;
        return Ok(workers);
    }
    Ok(flag.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())))
}

fn render_trace(trace: &engine::RunTrace) -> String {
    let mut out = String::new();
    for r in &trace.iterations {
        let _ = writeln!(
            out,
            "{}\t{:.6}\t{:.6}\t{}\t{}\t{}\t{:.3}",
            r.iteration, r.wcc, r.rel_change, r.joins, r.leaves, r.communities, r.seconds
        );
    }
    out
}

fn detect(args: DetectArgs) -> Result<(), Failure> {
    let workers = detect_workers(args.workers)?;
    let config = RunConfig {
        queue_size: args.queue_size.unwrap_or(workers),
        worker_count: workers,
        wcc_threshold: args.wcc_threshold,
        max_iterations: args.max_iterations,
        dump_each_iteration: args.dump_iterations,
        post_process: args.post_process,
    };
    config.validate().map_err(Failure::from)?;
    for warning in config.warnings() {
        eprintln!("owcc: warning: {warning}");
    }

    let graph = load_graph(&args.input)?;
    let initial = match &args.initial_cover {
        Some(path) => {
            let reader = open_input(path)?;
            Some(Cover::load(reader, &graph).map_err(Failure::from)?)
        }
        None => None,
    };

    fs::create_dir_all(&args.output_dir).map_err(|e| {
        Failure::new(
            EXIT_IO,
            format!("cannot create {}: {e}", args.output_dir.display()),
        )
    })?;

    let output_dir = args.output_dir.clone();
    let dump = config.dump_each_iteration;
    let result = engine::run_with_observer(&graph, &config, initial, |iteration, cover| {
        if dump {
            let path = output_dir.join(format!("iter_{iteration}.txt"));
            let mut buffer = Vec::new();
            cover.dump(&graph, &mut buffer)?;
            fs::write(path, buffer)?;
        }
        Ok(())
    })
    .map_err(|e| match e {
        Error::Io(io) => Failure::new(
            EXIT_IO,
            format!(
                "I/O failure mid-run; files under {} may be partial: {io}",
                args.output_dir.display()
            ),
        ),
        other => Failure::from(other),
    })?;

    let mut communities = Vec::new();
    result
        .cover
        .dump(&graph, &mut communities)
        .map_err(Failure::from)?;
    fs::write(args.output_dir.join("communities.txt"), communities).map_err(|e| {
        Failure::new(EXIT_IO, format!("writing communities.txt failed: {e}"))
    })?;
    fs::write(args.output_dir.join("trace.tsv"), render_trace(&result.trace)).map_err(|e| {
        Failure::new(EXIT_IO, format!("writing trace.tsv failed: {e}"))
    })?;
    Ok(())
}

/// Read a cover file into raw member-ID sets and check every ID against the
/// node universe.
fn load_checked_cover(
    path: &Path,
    universe: &Universe,
) -> Result<Vec<Vec<u64>>, Failure> {
    let reader = open_input(path)?;
    let sets = read_community_sets(reader).map_err(Failure::from)?;
    for id in sets.iter().flatten() {
        if !universe.contains(*id) {
            return Err(Failure::new(
                EXIT_DATA,
                format!("{}: node ID {id} outside the node universe", path.display()),
            ));
        }
    }
    Ok(evaluate::normalize_communities(&sets))
}

enum Universe {
    Size(usize),
    Graph(Graph),
}

impl Universe {
    fn contains(&self, id: u64) -> bool {
        match self {
            Universe::Size(n) => (id as u128) < *n as u128,
            Universe::Graph(g) => g.dense_id(id).is_some(),
        }
    }

    fn node_count(&self) -> usize {
        match self {
            Universe::Size(n) => *n,
            Universe::Graph(g) => g.node_count(),
        }
    }
}

fn evaluate_covers(args: EvaluateArgs) -> Result<(), Failure> {
    let universe = match (&args.nodes, &args.graph) {
        (Some(n), None) => Universe::Size(*n),
        (None, Some(path)) => Universe::Graph(load_graph(path)?),
        _ => unreachable!("clap enforces the universe group"),
    };
    let detected = load_checked_cover(&args.input, &universe)?;
    let truth = load_checked_cover(&args.truth, &universe)?;
    let f1 = evaluate::f1_overlapping(&detected, &truth).map_err(Failure::from)?;
    let onmi =
        evaluate::onmi_distance(&detected, &truth, universe.node_count()).map_err(Failure::from)?;
    println!("f1\t{f1:.5}");
    println!("onmi_distance\t{onmi:.5}");
    Ok(())
}

fn stats(args: StatsArgs) -> Result<(), Failure> {
    let reader = open_input(&args.input)?;
    let sets = read_community_sets(reader).map_err(Failure::from)?;
    let stats = evaluate::cover_stats(&sets).map_err(Failure::from)?;
    println!("community_count\t{}", stats.community_count);
    println!("size_min\t{}", stats.size_min);
    println!("size_max\t{}", stats.size_max);
    println!("size_mean\t{:.5}", stats.size_mean);
    println!("overlap_mean\t{:.5}", stats.overlap_mean);
    Ok(())
}

fn benchmark(args: BenchmarkArgs) -> Result<(), Failure> {
    let mut worker_counts = Vec::new();
    for token in args.workers.split(',') {
        let token = token.trim();
        let workers = token.parse::<usize>().map_err(|_| {
            Failure::new(EXIT_USAGE, format!("invalid worker count {token:?}"))
        })?;
        if workers < 1 {
            return Err(Failure::new(EXIT_USAGE, "worker counts must be at least 1"));
        }
        worker_counts.push(workers);
    }
    if worker_counts.is_empty() {
        return Err(Failure::new(EXIT_USAGE, "no worker counts given"));
    }

    let configs: Vec<RunConfig> = worker_counts
        .iter()
        .map(|&workers| RunConfig {
            queue_size: args.queue_size.unwrap_or(workers),
            worker_count: workers,
            wcc_threshold: args.wcc_threshold,
            max_iterations: args.max_iterations,
            dump_each_iteration: false,
            post_process: PostProcess::None,
        })
        .collect();
    for config in &configs {
        config.validate().map_err(Failure::from)?;
    }

    let graph = load_graph(&args.input)?;
    let rows = engine::benchmark(&graph, &configs).map_err(Failure::from)?;
    println!("workers\tseconds\tratio_to_1\titerations\tfinal_wcc");
    for row in rows {
        println!(
            "{}\t{:.3}\t{:.4}\t{}\t{:.6}",
            row.worker_count, row.seconds, row.ratio_to_baseline, row.iterations, row.final_wcc
        );
    }
    Ok(())
}
