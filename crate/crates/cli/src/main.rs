use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use commdet_bench::{
    run_bench, worker_threads, write_report, Algorithm, BenchConfig, ReportFormat,
};
use commdet_core::{
    louvain_run, lpa_run, modularity, parse_snap, read_assignment, write_assignment, Graph,
    LouvainConfig, LpaConfig, Partition, RawEdgeList,
};

/// Parallel community detection on SNAP edge lists.
#[derive(Debug, Parser)]
#[command(name = "commdet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Label propagation.
    Lpa(LpaArgs),
    /// Multi-level Louvain.
    Louvain(LouvainArgs),
    /// Modularity of an assignment file.
    Modularity { graph: PathBuf, assignment: PathBuf },
    /// Vertex, edge, loop, volume and degree statistics.
    Stats { graph: PathBuf },
    /// Time an algorithm across worker counts.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Fixed sequential visit order; byte-identical output for a given seed.
    #[arg(long)]
    deterministic: bool,
    /// Visit-order seed (deterministic mode only); 0 means ascending ids.
    #[arg(long, requires = "deterministic", default_value_t = 0)]
    seed: u64,
    /// Worker threads; overrides WORKER_THREADS.
    #[arg(long)]
    threads: Option<usize>,
    /// Assignment output file; stdout when omitted.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LpaArgs {
    graph: PathBuf,
    #[arg(long, default_value_t = 100)]
    max_iterations: usize,
    /// Stop once an iteration changes at most this many labels.
    #[arg(long, default_value_t = 0)]
    threshold: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct LouvainArgs {
    graph: PathBuf,
    /// Local-moving sweeps per level.
    #[arg(long, default_value_t = 20)]
    max_iterations: usize,
    #[arg(long, default_value_t = 32)]
    max_levels: usize,
    /// Write the flattened assignment of every level as TSV.
    #[arg(long)]
    levels_out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct BenchArgs {
    graph: PathBuf,
    #[arg(long)]
    algo: Algorithm,
    /// Comma-separated worker counts, e.g. 1,2,4,8.
    #[arg(long, value_delimiter = ',', required = true)]
    threads: Vec<usize>,
    #[arg(long, default_value_t = commdet_bench::DEFAULT_REPETITIONS)]
    reps: usize,
    #[arg(long, default_value = "json")]
    format: ReportFormat,
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Input(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
        }
    }
}

impl From<commdet_core::Error> for CliError {
    fn from(e: commdet_core::Error) -> Self {
        match e {
            commdet_core::Error::Config(_) => CliError::Usage(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<commdet_bench::BenchError> for CliError {
    fn from(e: commdet_bench::BenchError) -> Self {
        match e {
            commdet_bench::BenchError::InvalidThreads(_) | commdet_bench::BenchError::Empty(_) => {
                CliError::Usage(e.to_string())
            }
            commdet_bench::BenchError::Core(core) => core.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |e| CliError::Input(format!("{}: {e}", path.display()))
}

fn load(path: &Path) -> Result<(RawEdgeList, Graph), CliError> {
    let file = File::open(path).map_err(io_err(path))?;
    let raw = parse_snap(BufReader::new(file))
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let graph = raw.to_graph()?;
    Ok((raw, graph))
}

fn format_q(g: &Graph, p: &Partition) -> Result<String, CliError> {
    match modularity(g, p) {
        Ok(q) => Ok(format!("{q:.9}")),
        Err(commdet_core::Error::ZeroVolume) => Ok("undefined".into()),
        Err(e) => Err(e.into()),
    }
}

fn install_threads(threads: Option<usize>) -> Result<(), CliError> {
    let t = worker_threads(threads)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(t)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

/// Writes the assignment to `-o` or stdout and returns where the summary
/// goes: stdout if the assignment went to a file, stderr otherwise.
fn emit_assignment(
    p: &Partition,
    raw: &RawEdgeList,
    output: Option<&Path>,
) -> Result<Box<dyn Write>, CliError> {
    match output {
        Some(path) => {
            let file = File::create(path).map_err(io_err(path))?;
            write_assignment(p, &raw.reverse_map, BufWriter::new(file))?;
            Ok(Box::new(io::stdout()))
        }
        None => {
            write_assignment(p, &raw.reverse_map, io::stdout().lock())?;
            Ok(Box::new(io::stderr()))
        }
    }
}

fn summary_line(out: &mut dyn Write, line: String) -> Result<(), CliError> {
    writeln!(out, "{line}").map_err(|e| CliError::Input(e.to_string()))
}

fn cmd_lpa(args: LpaArgs) -> Result<(), CliError> {
    install_threads(args.common.threads)?;
    let (raw, g) = load(&args.graph)?;
    let cfg = LpaConfig {
        max_iterations: args.max_iterations,
        threshold: args.threshold,
        deterministic: args.common.deterministic,
        seed: args.common.seed,
    };
    let out = lpa_run(&g, &cfg)?;
    let mut summary = emit_assignment(&out.partition, &raw, args.common.output.as_deref())?;
    let q = format_q(&g, &out.partition)?;
    summary_line(
        &mut summary,
        format!(
            "communities={} iterations={} modularity={q}",
            out.partition.num_communities(),
            out.iterations
        ),
    )
}

fn write_levels(path: &Path, levels: &[Partition], raw: &RawEdgeList) -> Result<(), CliError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    let mut rows: Vec<(u64, usize)> = raw.reverse_map.iter().copied().zip(0..).collect();
    rows.sort_unstable();
    let mut text = String::from("vertex");
    for i in 1..=levels.len() {
        text.push_str(&format!("\tlevel_{i}"));
    }
    text.push('\n');
    for (raw_id, v) in rows {
        text.push_str(&raw_id.to_string());
        for p in levels {
            text.push_str(&format!("\t{}", p.assignment()[v]));
        }
        text.push('\n');
    }
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .map_err(io_err(path))
}

fn cmd_louvain(args: LouvainArgs) -> Result<(), CliError> {
    install_threads(args.common.threads)?;
    let (raw, g) = load(&args.graph)?;
    let cfg = LouvainConfig {
        max_iterations: args.max_iterations,
        max_levels: args.max_levels,
        deterministic: args.common.deterministic,
        seed: args.common.seed,
    };
    let (dendrogram, _) = louvain_run(&g, &cfg)?;
    let flats = dendrogram.flattened_levels()?;
    if let Some(path) = &args.levels_out {
        write_levels(path, &flats, &raw)?;
    }
    let final_partition = &dendrogram.final_partition;
    let mut summary = emit_assignment(final_partition, &raw, args.common.output.as_deref())?;
    for (i, level) in dendrogram.levels.iter().enumerate() {
        summary_line(
            &mut summary,
            format!(
                "level={} vertices={} communities={} modularity={:.9}",
                i + 1,
                level.partition.len(),
                level.partition.num_communities(),
                dendrogram.modularity_per_level[i]
            ),
        )?;
    }
    let q = format_q(&g, final_partition)?;
    summary_line(
        &mut summary,
        format!(
            "levels={} communities={} modularity={q}",
            dendrogram.levels.len(),
            final_partition.num_communities()
        ),
    )
}

fn cmd_modularity(graph: &Path, assignment: &Path) -> Result<(), CliError> {
    let (raw, g) = load(graph)?;
    let file = File::open(assignment).map_err(io_err(assignment))?;
    let p = read_assignment(BufReader::new(file), &raw)
        .map_err(|e| CliError::Input(format!("{}: {e}", assignment.display())))?;
    let q = modularity(&g, &p)?;
    println!("{q:.9}");
    Ok(())
}

fn cmd_stats(graph: &Path) -> Result<(), CliError> {
    let (_, g) = load(graph)?;
    let n = g.num_vertices();
    let degrees: Vec<usize> = (0..n).map(|v| g.neighbors(v).len()).collect();
    let min = degrees.iter().copied().min().unwrap_or(0);
    let max = degrees.iter().copied().max().unwrap_or(0);
    let mean = if n == 0 {
        0.0
    } else {
        degrees.iter().sum::<usize>() as f64 / n as f64
    };
    println!(
        "n={n} m={} volume={:.9} loops={} min_degree={min} max_degree={max} mean_degree={mean:.9}",
        g.num_edges(),
        g.total_volume(),
        g.num_loops()
    );
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    let reports = run_bench(
        &args.graph,
        args.algo,
        &BenchConfig::default(),
        &args.threads,
        args.reps,
    )?;
    match &args.output {
        Some(path) => {
            let file = File::create(path).map_err(io_err(path))?;
            write_report(&reports, args.format, BufWriter::new(file))?;
        }
        None => write_report(&reports, args.format, io::stdout().lock())?,
    }
    for r in &reports {
        eprintln!(
            "threads={} total={:.9} modularity={:.9}",
            r.threads, r.total_seconds.mean, r.final_modularity
        );
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Lpa(args) => cmd_lpa(args),
        Command::Louvain(args) => cmd_louvain(args),
        Command::Modularity { graph, assignment } => cmd_modularity(&graph, &assignment),
        Command::Stats { graph } => cmd_stats(&graph),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (CliError::Usage(msg) | CliError::Input(msg)) = &e;
            eprintln!("commdet: {msg}");
            ExitCode::from(e.exit_code())
        }
    }
}
