//! Ensemble sweep: for every `(n, d)` cell generate graphs, run QAOA₁,
//! RQAOA₁, sector-rounded SDP and random colorings, and record
//! approximation ratios against the planted optimum `|E|`.
//!
//! Graphs are processed in parallel, but rows reach `results.csv` in grid
//! order through a single writer, so the file is identical across runs with
//! the same master seed. Wall-clock times go to `manifest.json` only.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{newman_best_of, random_cut_statistics, SdpConfig};
use crate::error::{Error, Result};
use crate::graph::{generate_ensemble_graph, known_max_cut, EnsembleConfig, Graph};
use crate::hamiltonian::CostHamiltonian;
use crate::optimizer::{AngleOptimizer, AutoOptimizer, LocalSearch};
use crate::rqaoa::{self, DEFAULT_CUTOFF};

pub const SCHEMA_VERSION: u32 = 1;
pub const CSV_COLUMNS: [&str; 15] = [
    "graph_id",
    "n",
    "d",
    "seed",
    "qaoa1_ratio",
    "rqaoa1_ratio",
    "newman_best_ratio",
    "newman_mean_ratio",
    "newman_std_ratio",
    "random_mean_ratio",
    "beta0",
    "beta1",
    "beta2",
    "gamma",
    "status",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub n_list: Vec<usize>,
    pub d_list: Vec<usize>,
    pub graphs_per_cell: usize,
    pub k: usize,
    pub newman_samples: usize,
    pub random_draws: usize,
    pub cutoff: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Per-graph wall-clock budget, checked between pipeline stages.
    pub timeout_secs: u64,
    pub sdp: SdpConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n_list: vec![30, 60, 150, 300],
            d_list: vec![4, 6, 8, 10],
            graphs_per_cell: 20,
            k: 3,
            newman_samples: 100,
            random_draws: 1000,
            cutoff: DEFAULT_CUTOFF,
            seed: 2024,
            output_dir: PathBuf::from("results"),
            timeout_secs: 600,
            sdp: SdpConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("graphs_per_cell", self.graphs_per_cell),
            ("newman_samples", self.newman_samples),
            ("random_draws", self.random_draws),
            ("cutoff", self.cutoff),
        ];
        for (name, value) in positive {
            if value == 0 {
                return Err(Error::InvalidArgument(format!("{name} must be positive")));
            }
        }
        if self.n_list.is_empty() || self.d_list.is_empty() {
            return Err(Error::InvalidArgument("n_list and d_list must be non-empty".into()));
        }
        // planted graphs are 3-colorable, so |E| is the optimum only for k ≥ 3
        if self.k < 3 {
            return Err(Error::InvalidArgument(format!(
                "ensemble optimum |E| is only known for k ≥ 3, got k = {}",
                self.k
            )));
        }
        for &n in &self.n_list {
            for &d in &self.d_list {
                EnsembleConfig::new(n, d, 0).validate()?;
            }
        }
        Ok(())
    }

    /// Grid in output order: `n` outermost, then `d`, then graph index.
    pub fn jobs(&self) -> Vec<Job> {
        let mut out = Vec::new();
        for &n in &self.n_list {
            for &d in &self.d_list {
                for index in 0..self.graphs_per_cell {
                    out.push(Job {
                        n,
                        d,
                        index,
                        seed: graph_seed(self.seed, n, d, index),
                    });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Job {
    pub n: usize,
    pub d: usize,
    pub index: usize,
    pub seed: u64,
}

impl Job {
    pub fn graph_id(&self) -> String {
        format!("n{}-d{}-{:02}", self.n, self.d, self.index)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `splitmix64` folded over `(master, n, d, index)`; stable across platforms.
pub fn graph_seed(master: u64, n: usize, d: usize, index: usize) -> u64 {
    [n as u64, d as u64, index as u64]
        .into_iter()
        .fold(splitmix64(master), |acc, x| splitmix64(acc ^ x))
}

/// Independent sub-seed for one pipeline stage of a graph.
fn stage_seed(seed: u64, stage: u64) -> u64 {
    splitmix64(seed ^ stage.wrapping_mul(0xd1b5_4a32_d192_ed03))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub graph_id: String,
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub qaoa1_ratio: Option<f64>,
    pub rqaoa1_ratio: Option<f64>,
    pub newman_best_ratio: Option<f64>,
    pub newman_mean_ratio: Option<f64>,
    pub newman_std_ratio: Option<f64>,
    pub random_mean_ratio: Option<f64>,
    pub beta0: Option<f64>,
    pub beta1: Option<f64>,
    pub beta2: Option<f64>,
    pub gamma: Option<f64>,
    pub status: String,
}

impl ExperimentRow {
    fn empty(job: &Job) -> Self {
        ExperimentRow {
            graph_id: job.graph_id(),
            n: job.n,
            d: job.d,
            seed: job.seed,
            qaoa1_ratio: None,
            rqaoa1_ratio: None,
            newman_best_ratio: None,
            newman_mean_ratio: None,
            newman_std_ratio: None,
            random_mean_ratio: None,
            beta0: None,
            beta1: None,
            beta2: None,
            gamma: None,
            status: "ok".into(),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    /// Ratio columns by CSV name.
    pub fn ratios(&self) -> [(&'static str, Option<f64>); 6] {
        [
            ("qaoa1_ratio", self.qaoa1_ratio),
            ("rqaoa1_ratio", self.rqaoa1_ratio),
            ("newman_best_ratio", self.newman_best_ratio),
            ("newman_mean_ratio", self.newman_mean_ratio),
            ("newman_std_ratio", self.newman_std_ratio),
            ("random_mean_ratio", self.random_mean_ratio),
        ]
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimes {
    pub graph_id: String,
    pub generate: f64,
    pub qaoa1: f64,
    pub rqaoa1: f64,
    pub newman: f64,
    pub random: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub rows: Vec<ExperimentRow>,
    pub timings: Vec<StageTimes>,
}

struct Stopwatch {
    start: Instant,
    budget: Duration,
}

impl Stopwatch {
    fn expired(&self) -> bool {
        self.start.elapsed() > self.budget
    }
}

fn timed<R>(slot: &mut f64, f: impl FnOnce() -> R) -> R {
    let t = Instant::now();
    let out = f();
    *slot = t.elapsed().as_secs_f64();
    out
}

/// Runs the full pipeline on one graph. Failures end up in `status`.
pub fn run_graph(config: &ExperimentConfig, job: &Job) -> (ExperimentRow, StageTimes) {
    let watch = Stopwatch {
        start: Instant::now(),
        budget: Duration::from_secs(config.timeout_secs),
    };
    let mut row = ExperimentRow::empty(job);
    let mut times = StageTimes {
        graph_id: row.graph_id.clone(),
        ..Default::default()
    };
    if let Err(e) = pipeline(config, job, &watch, &mut row, &mut times) {
        row.status = match e {
            StageError::Timeout(stage) => format!("timeout before {stage}"),
            StageError::Failed(stage, err) => format!("error in {stage}: {err}"),
        };
    }
    times.total = watch.start.elapsed().as_secs_f64();
    (row, times)
}

enum StageError {
    Timeout(&'static str),
    Failed(&'static str, Error),
}

fn pipeline(
    config: &ExperimentConfig,
    job: &Job,
    watch: &Stopwatch,
    row: &mut ExperimentRow,
    times: &mut StageTimes,
) -> std::result::Result<(), StageError> {
    let k = config.k;
    let stage = |name: &'static str| {
        if watch.expired() {
            Err(StageError::Timeout(name))
        } else {
            Ok(())
        }
    };
    let fail = |name: &'static str| move |e: Error| StageError::Failed(name, e);

    let g: Graph = timed(&mut times.generate, || {
        generate_ensemble_graph(&EnsembleConfig::new(job.n, job.d, job.seed))
    })
    .map_err(fail("generate"))?;
    let c_max = known_max_cut(&g).map_err(fail("generate"))? as f64;
    let exact = CostHamiltonian::<i64>::from_graph(&g, k).map_err(fail("generate"))?;
    let ham = exact.map(|v| v as f64);
    let optimizer = AutoOptimizer {
        local: LocalSearch {
            seed: stage_seed(job.seed, 1),
            ..LocalSearch::default()
        },
        ..AutoOptimizer::default()
    };

    stage("qaoa1")?;
    let qaoa = timed(&mut times.qaoa1, || optimizer.optimize(&ham)).map_err(fail("qaoa1"))?;
    row.qaoa1_ratio = Some(qaoa.energy / c_max);
    let beta = &qaoa.angles.beta;
    row.beta0 = beta.first().copied();
    row.beta1 = beta.get(1).copied();
    row.beta2 = beta.get(2).copied();
    row.gamma = Some(qaoa.angles.gamma);

    stage("rqaoa1")?;
    let rq = timed(&mut times.rqaoa1, || rqaoa::run(&ham, config.cutoff, &optimizer)).map_err(fail("rqaoa1"))?;
    let check = exact.classical_energy(&rq.coloring).map_err(fail("rqaoa1"))?;
    if check as f64 != rq.value {
        return Err(StageError::Failed(
            "rqaoa1",
            Error::Numerical(format!("reported value {} but coloring scores {check}", rq.value)),
        ));
    }
    row.rqaoa1_ratio = Some(check as f64 / c_max);

    stage("newman")?;
    let sdp = SdpConfig {
        seed: stage_seed(job.seed, 2),
        ..config.sdp
    };
    let newman = timed(&mut times.newman, || {
        newman_best_of(&g, k, config.newman_samples, stage_seed(job.seed, 3), &sdp)
    })
    .map_err(fail("newman"))?;
    row.newman_best_ratio = Some(newman.best / c_max);
    row.newman_mean_ratio = Some(newman.mean / c_max);
    row.newman_std_ratio = Some(newman.std / c_max);

    stage("random")?;
    let (mean, _) = timed(&mut times.random, || {
        random_cut_statistics(&g, k, config.random_draws, stage_seed(job.seed, 4))
    })
    .map_err(fail("random"))?;
    row.random_mean_ratio = Some(mean / c_max);
    Ok(())
}

/// Writes rows in job order regardless of completion order, flushing after
/// every row so an interrupted run leaves a valid prefix.
struct OrderedWriter {
    out: csv::Writer<File>,
    next: usize,
    pending: BTreeMap<usize, ExperimentRow>,
}

impl OrderedWriter {
    fn create(path: &Path) -> Result<Self> {
        let mut file = File::create(path)?;
        writeln!(file, "# schema_version={SCHEMA_VERSION}")?;
        let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(file);
        out.write_record(CSV_COLUMNS)?;
        out.flush()?;
        Ok(OrderedWriter {
            out,
            next: 0,
            pending: BTreeMap::new(),
        })
    }

    fn push(&mut self, index: usize, row: ExperimentRow) -> Result<()> {
        self.pending.insert(index, row);
        while let Some(row) = self.pending.remove(&self.next) {
            self.out.serialize(&row)?;
            self.out.flush()?;
            self.next += 1;
        }
        Ok(())
    }
}

/// Runs the sweep and writes `results.csv`, `summary.json`, `summary.md`
/// and `manifest.json` into `config.output_dir`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    fs::create_dir_all(&config.output_dir)?;
    let jobs = config.jobs();
    let writer = Mutex::new(OrderedWriter::create(&config.output_dir.join("results.csv"))?);
    let outputs: Vec<(ExperimentRow, StageTimes)> = jobs
        .par_iter()
        .enumerate()
        .map(|(i, job)| {
            let (row, times) = run_graph(config, job);
            writer
                .lock()
                .expect("writer lock poisoned")
                .push(i, row.clone())?;
            Ok((row, times))
        })
        .collect::<Result<_>>()?;
    let (rows, timings): (Vec<_>, Vec<_>) = outputs.into_iter().unzip();
    let result = ExperimentResult { rows, timings };

    let summary = summarize(&result.rows);
    fs::write(
        config.output_dir.join("summary.json"),
        serde_json::to_string_pretty(&summary)?,
    )?;
    fs::write(config.output_dir.join("summary.md"), summary_markdown(&summary))?;
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        crate_version: env!("CARGO_PKG_VERSION").into(),
        config: config.clone(),
        graphs: jobs
            .iter()
            .zip(&result.timings)
            .map(|(job, t)| ManifestEntry {
                graph_id: job.graph_id(),
                n: job.n,
                d: job.d,
                index: job.index,
                seed: job.seed,
                wall_times: t.clone(),
            })
            .collect(),
    };
    fs::write(
        config.output_dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    Ok(result)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub crate_version: String,
    pub config: ExperimentConfig,
    pub graphs: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub graph_id: String,
    pub n: usize,
    pub d: usize,
    pub index: usize,
    pub seed: u64,
    pub wall_times: StageTimes,
}

/// Reads a `results.csv`, checking the schema line and the exact header.
pub fn read_results(path: &Path) -> Result<Vec<ExperimentRow>> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    if first.trim() != format!("# schema_version={SCHEMA_VERSION}") {
        return Err(Error::InvalidArgument(format!(
            "unexpected schema line {:?}",
            first.trim()
        )));
    }
    let mut csv = csv::Reader::from_reader(reader);
    let header: Vec<String> = csv.headers()?.iter().map(str::to_owned).collect();
    if header != CSV_COLUMNS {
        return Err(Error::InvalidArgument(format!("unexpected header {header:?}")));
    }
    csv.deserialize().map(|r| r.map_err(Error::from)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnStats {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl ColumnStats {
    fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let count = values.len();
        let mean = values.iter().sum::<f64>() / count as f64;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / count as f64;
        Some(ColumnStats {
            mean: mean.clamp(
                values.iter().cloned().fold(f64::INFINITY, f64::min),
                values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            ),
            std: var.sqrt(),
            min: values.iter().cloned().fold(f64::INFINITY, f64::min),
            max: values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            count,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub n: usize,
    pub d: usize,
    pub graphs: usize,
    pub ok: usize,
    pub columns: BTreeMap<String, ColumnStats>,
    /// Fraction of graphs with both ratios where RQAOA₁ ≥ QAOA₁.
    pub rqaoa_at_least_qaoa: Option<f64>,
}

/// Per-`(n, d)` statistics of every ratio column, in first-seen cell order.
pub fn summarize(rows: &[ExperimentRow]) -> Vec<CellSummary> {
    let mut order: Vec<(usize, usize)> = Vec::new();
    let mut cells: BTreeMap<(usize, usize), Vec<&ExperimentRow>> = BTreeMap::new();
    for row in rows {
        let key = (row.n, row.d);
        if !cells.contains_key(&key) {
            order.push(key);
        }
        cells.entry(key).or_default().push(row);
    }
    order
        .into_iter()
        .map(|(n, d)| {
            let members = &cells[&(n, d)];
            let mut columns = BTreeMap::new();
            for (idx, (name, _)) in members[0].ratios().iter().enumerate() {
                let values: Vec<f64> = members.iter().filter_map(|r| r.ratios()[idx].1).collect();
                if let Some(stats) = ColumnStats::of(&values) {
                    columns.insert((*name).to_owned(), stats);
                }
            }
            let paired: Vec<bool> = members
                .iter()
                .filter_map(|r| Some(r.rqaoa1_ratio? >= r.qaoa1_ratio?))
                .collect();
            let rqaoa_at_least_qaoa = (!paired.is_empty())
                .then(|| paired.iter().filter(|&&b| b).count() as f64 / paired.len() as f64);
            CellSummary {
                n,
                d,
                graphs: members.len(),
                ok: members.iter().filter(|r| r.is_ok()).count(),
                columns,
                rqaoa_at_least_qaoa,
            }
        })
        .collect()
}

pub fn summary_markdown(summary: &[CellSummary]) -> String {
    let mut s = String::from(
        "| n | d | ok/graphs | QAOA1 | RQAOA1 | Newman best | Newman mean | random | RQAOA1 >= QAOA1 |\n\
         |---|---|---|---|---|---|---|---|---|\n",
    );
    let fmt = |c: &CellSummary, name: &str| {
        c.columns
            .get(name)
            .map_or("-".to_owned(), |st| format!("{:.4} ± {:.4}", st.mean, st.std))
    };
    for c in summary {
        s.push_str(&format!(
            "| {} | {} | {}/{} | {} | {} | {} | {} | {} | {} |\n",
            c.n,
            c.d,
            c.ok,
            c.graphs,
            fmt(c, "qaoa1_ratio"),
            fmt(c, "rqaoa1_ratio"),
            fmt(c, "newman_best_ratio"),
            fmt(c, "newman_mean_ratio"),
            fmt(c, "random_mean_ratio"),
            c.rqaoa_at_least_qaoa.map_or("-".to_owned(), |f| format!("{:.0}%", 100.0 * f)),
        ));
    }
    s
}
