//! Timing harness for the community-detection kernels.
//!
//! A run loads one dataset, then for each requested worker count executes
//! the algorithm `repetitions` times on a dedicated rayon pool and reports
//! mean wall-clock time per phase. Parsing and CSR build are timed once and
//! kept out of the algorithm total, as is modularity evaluation.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;
use std::time::Instant;

use commdet_core::{louvain_run, lpa_run, modularity, parse_snap, Graph, LouvainConfig, LpaConfig};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Environment variable holding the default worker count.
pub const WORKER_THREADS_ENV: &str = "WORKER_THREADS";

/// Repetitions per configuration unless told otherwise.
pub const DEFAULT_REPETITIONS: usize = 5;

pub const PHASE_INGEST: &str = "ingest";
pub const PHASE_BUILD: &str = "build";
pub const PHASE_LOCAL_MOVING: &str = "local_moving";
pub const PHASE_AGGREGATION: &str = "aggregation";
pub const PHASE_LABEL_PROPAGATION: &str = "label_propagation";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Core(#[from] commdet_core::Error),
    #[error("cannot read {path}: {source}")]
    Dataset {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid thread count {0:?}")]
    InvalidThreads(String),
    #[error("at least one {0} is required")]
    Empty(&'static str),
    #[error(transparent)]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Lpa,
    Louvain,
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "lpa" => Ok(Algorithm::Lpa),
            "louvain" => Ok(Algorithm::Louvain),
            other => Err(format!(
                "unknown algorithm {other:?} (expected lpa or louvain)"
            )),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::Lpa => "lpa",
            Algorithm::Louvain => "louvain",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub mean: f64,
    pub runs: Vec<f64>,
}

impl Timing {
    pub fn from_runs(runs: Vec<f64>) -> Self {
        Timing {
            mean: mean(&runs),
            runs,
        }
    }
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub dataset: String,
    pub algorithm: Algorithm,
    pub threads: usize,
    pub repetitions: usize,
    /// Algorithm wall time; excludes ingest, build and modularity.
    pub total_seconds: Timing,
    /// Mean seconds per phase.
    pub phase_seconds: BTreeMap<String, f64>,
    pub iterations: usize,
    pub levels: usize,
    pub final_modularity: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchConfig {
    pub lpa: LpaConfig,
    pub louvain: LouvainConfig,
}

/// A parsed and built dataset with its load timings.
#[derive(Debug)]
pub struct Dataset {
    pub name: String,
    pub graph: Graph,
    pub ingest_seconds: f64,
    pub build_seconds: f64,
}

impl Dataset {
    pub fn load(path: &Path) -> Result<Dataset> {
        let dataset_err = |source| BenchError::Dataset {
            path: path.display().to_string(),
            source,
        };
        let file = File::open(path).map_err(dataset_err)?;
        let start = Instant::now();
        let raw = parse_snap(BufReader::new(file))?;
        let ingest_seconds = start.elapsed().as_secs_f64();
        let start = Instant::now();
        let graph = raw.to_graph()?;
        let build_seconds = start.elapsed().as_secs_f64();
        let name = path
            .file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_default();
        Ok(Dataset {
            name,
            graph,
            ingest_seconds,
            build_seconds,
        })
    }

    pub fn in_memory(name: impl Into<String>, graph: Graph) -> Dataset {
        Dataset {
            name: name.into(),
            graph,
            ingest_seconds: 0.0,
            build_seconds: 0.0,
        }
    }
}

/// Worker count: explicit value, else `WORKER_THREADS`, else the number of
/// available cores.
pub fn worker_threads(explicit: Option<usize>) -> Result<usize> {
    if let Some(t) = explicit {
        return check_threads(t);
    }
    match std::env::var(WORKER_THREADS_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| BenchError::InvalidThreads(s.clone()))
            .and_then(check_threads),
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn check_threads(t: usize) -> Result<usize> {
    if t == 0 {
        Err(BenchError::InvalidThreads(t.to_string()))
    } else {
        Ok(t)
    }
}

/// Runs `f` on a fresh pool of `threads` workers.
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(check_threads(threads)?)
        .build()?;
    Ok(pool.install(f))
}

struct RunSample {
    total: f64,
    phases: Vec<(&'static str, f64)>,
    iterations: usize,
    levels: usize,
    partition: commdet_core::Partition,
}

fn run_once(graph: &Graph, algorithm: Algorithm, cfg: &BenchConfig) -> Result<RunSample> {
    let start = Instant::now();
    let sample = match algorithm {
        Algorithm::Lpa => {
            let out = lpa_run(graph, &cfg.lpa)?;
            let total = start.elapsed().as_secs_f64();
            RunSample {
                total,
                phases: vec![(PHASE_LABEL_PROPAGATION, total)],
                iterations: out.iterations,
                levels: 1,
                partition: out.partition,
            }
        }
        Algorithm::Louvain => {
            let (dendrogram, timings) = louvain_run(graph, &cfg.louvain)?;
            let total = (start.elapsed() - timings.modularity).as_secs_f64();
            RunSample {
                total,
                phases: vec![
                    (PHASE_LOCAL_MOVING, timings.local_moving.as_secs_f64()),
                    (PHASE_AGGREGATION, timings.aggregation.as_secs_f64()),
                ],
                iterations: timings.sweeps,
                levels: timings.levels,
                partition: dendrogram.final_partition,
            }
        }
    };
    Ok(sample)
}

/// Benchmarks an already loaded dataset at each worker count.
pub fn bench_dataset(
    dataset: &Dataset,
    algorithm: Algorithm,
    cfg: &BenchConfig,
    threads: &[usize],
    repetitions: usize,
) -> Result<Vec<BenchReport>> {
    if threads.is_empty() {
        return Err(BenchError::Empty("thread count"));
    }
    if repetitions == 0 {
        return Err(BenchError::Empty("repetition"));
    }
    threads
        .iter()
        .try_for_each(|&t| check_threads(t).map(drop))?;

    let mut reports = Vec::with_capacity(threads.len());
    for &t in threads {
        let samples = with_threads(t, || {
            (0..repetitions)
                .map(|_| run_once(&dataset.graph, algorithm, cfg))
                .collect::<Result<Vec<_>>>()
        })??;

        let mut phase_seconds = BTreeMap::new();
        phase_seconds.insert(PHASE_INGEST.to_string(), dataset.ingest_seconds);
        phase_seconds.insert(PHASE_BUILD.to_string(), dataset.build_seconds);
        for (i, (name, _)) in samples[0].phases.iter().enumerate() {
            let per_run: Vec<f64> = samples.iter().map(|s| s.phases[i].1).collect();
            phase_seconds.insert(name.to_string(), mean(&per_run));
        }
        let last = samples.last().expect("repetitions >= 1");
        let final_modularity = match modularity(&dataset.graph, &last.partition) {
            Err(commdet_core::Error::ZeroVolume) => 0.0,
            other => other?,
        };
        reports.push(BenchReport {
            dataset: dataset.name.clone(),
            algorithm,
            threads: t,
            repetitions,
            total_seconds: Timing::from_runs(samples.iter().map(|s| s.total).collect()),
            phase_seconds,
            iterations: last.iterations,
            levels: last.levels,
            final_modularity,
        });
    }
    Ok(reports)
}

/// Loads the SNAP file at `path` and benchmarks it at each worker count.
pub fn run_bench(
    path: &Path,
    algorithm: Algorithm,
    cfg: &BenchConfig,
    threads: &[usize],
    repetitions: usize,
) -> Result<Vec<BenchReport>> {
    if threads.is_empty() {
        return Err(BenchError::Empty("thread count"));
    }
    let dataset = Dataset::load(path)?;
    bench_dataset(&dataset, algorithm, cfg, threads, repetitions)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(format!("unknown format {other:?} (expected json or csv)")),
        }
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    dataset: &'a str,
    algorithm: Algorithm,
    threads: usize,
    repetitions: usize,
    phase: &'a str,
    phase_mean_seconds: f64,
    total_mean_seconds: f64,
    iterations: usize,
    levels: usize,
    final_modularity: f64,
}

impl<'a> CsvRow<'a> {
    fn new(r: &'a BenchReport, phase: &'a str, phase_mean_seconds: f64) -> Self {
        CsvRow {
            dataset: &r.dataset,
            algorithm: r.algorithm,
            threads: r.threads,
            repetitions: r.repetitions,
            phase,
            phase_mean_seconds,
            total_mean_seconds: r.total_seconds.mean,
            iterations: r.iterations,
            levels: r.levels,
            final_modularity: r.final_modularity,
        }
    }
}

/// JSON: one array of report objects. CSV: one row per (report, phase),
/// or a single `total` row when a report has no phases.
pub fn write_report<W: Write>(
    reports: &[BenchReport],
    format: ReportFormat,
    mut sink: W,
) -> Result<()> {
    if reports.is_empty() {
        return Err(BenchError::Empty("report"));
    }
    match format {
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut sink, reports)?;
            writeln!(sink)?;
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut sink);
            for r in reports {
                if r.phase_seconds.is_empty() {
                    w.serialize(CsvRow::new(r, "total", r.total_seconds.mean))?;
                }
                for (name, &secs) in &r.phase_seconds {
                    w.serialize(CsvRow::new(r, name, secs))?;
                }
            }
            w.flush()?;
        }
    }
    sink.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use commdet_core::generate::barbell;

    fn sample_report(phases: &[&str]) -> BenchReport {
        BenchReport {
            dataset: "barbell".into(),
            algorithm: Algorithm::Louvain,
            threads: 1,
            repetitions: 2,
            total_seconds: Timing::from_runs(vec![0.5, 1.5]),
            phase_seconds: phases.iter().map(|p| (p.to_string(), 0.25)).collect(),
            iterations: 3,
            levels: 2,
            final_modularity: 0.357142857,
        }
    }

    #[test]
    fn barbell_single_thread() {
        let data = Dataset::in_memory("barbell", barbell());
        let cfg = BenchConfig::default();
        let reports = bench_dataset(&data, Algorithm::Louvain, &cfg, &[1], 3).unwrap();
        assert_eq!(reports.len(), 1);
        let r = &reports[0];
        assert_eq!(r.repetitions, 3);
        assert_eq!(r.total_seconds.runs.len(), 3);
        assert!((r.final_modularity - 0.357_142_857).abs() < 1e-9);
        assert_eq!(r.levels, 2);
        for phase in [
            PHASE_INGEST,
            PHASE_BUILD,
            PHASE_LOCAL_MOVING,
            PHASE_AGGREGATION,
        ] {
            assert!(r.phase_seconds.contains_key(phase), "{phase}");
        }
    }

    #[test]
    fn mean_matches_runs() {
        let data = Dataset::in_memory("barbell", barbell());
        let reports =
            bench_dataset(&data, Algorithm::Lpa, &BenchConfig::default(), &[1, 2], 4).unwrap();
        for r in &reports {
            let m = r.total_seconds.runs.iter().sum::<f64>() / r.total_seconds.runs.len() as f64;
            assert!((r.total_seconds.mean - m).abs() <= 1e-12);
            assert!(r.total_seconds.mean + 1e-12 >= r.phase_seconds[PHASE_LABEL_PROPAGATION]);
        }
        assert_eq!(
            reports.iter().map(|r| r.threads).collect::<Vec<_>>(),
            vec![1, 2]
        );
    }

    #[test]
    fn rejects_bad_arguments() {
        let data = Dataset::in_memory("barbell", barbell());
        let cfg = BenchConfig::default();
        assert!(bench_dataset(&data, Algorithm::Lpa, &cfg, &[], 1).is_err());
        assert!(bench_dataset(&data, Algorithm::Lpa, &cfg, &[0], 1).is_err());
        assert!(bench_dataset(&data, Algorithm::Lpa, &cfg, &[1], 0).is_err());
        assert!(matches!(
            run_bench(
                Path::new("/nonexistent/graph.txt"),
                Algorithm::Lpa,
                &cfg,
                &[1],
                1
            ),
            Err(BenchError::Dataset { .. })
        ));
        assert!(worker_threads(Some(0)).is_err());
        assert_eq!(worker_threads(Some(3)).unwrap(), 3);
    }

    #[test]
    fn json_is_single_element_array() {
        let mut out = Vec::new();
        write_report(
            &[sample_report(&["local_moving"])],
            ReportFormat::Json,
            &mut out,
        )
        .unwrap();
        let parsed: serde_json::Value = serde_json::from_slice(&out).unwrap();
        let arr = parsed.as_array().unwrap();
        assert_eq!(arr.len(), 1);
        let obj = arr[0].as_object().unwrap();
        for key in [
            "dataset",
            "algorithm",
            "threads",
            "repetitions",
            "total_seconds",
            "phase_seconds",
            "iterations",
            "levels",
            "final_modularity",
        ] {
            assert!(obj.contains_key(key), "{key}");
        }
        assert_eq!(obj["algorithm"], "louvain");
        assert_eq!(obj["total_seconds"]["mean"], 1.0);
    }

    #[test]
    fn csv_rows_per_phase() {
        let phases = ["aggregation", "build", "ingest", "local_moving"];
        let reports: Vec<_> = (0..7).map(|_| sample_report(&phases)).collect();
        let mut out = Vec::new();
        write_report(&reports, ReportFormat::Csv, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert!(lines[0].starts_with("dataset,algorithm,threads,repetitions,phase,"));
        assert_eq!(lines.len() - 1, 7 * phases.len());
    }

    #[test]
    fn csv_without_phases_has_total_row() {
        let mut out = Vec::new();
        write_report(&[sample_report(&[])], ReportFormat::Csv, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let rows: Vec<_> = text.lines().skip(1).collect();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].split(',').nth(4), Some("total"));
    }

    #[test]
    fn empty_report_list_is_rejected() {
        assert!(write_report(&[], ReportFormat::Json, Vec::new()).is_err());
    }
}
