use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use qudit_qaoa::baselines::{newman_best_of, SdpConfig};
use qudit_qaoa::experiments::{graph_seed, run_experiment, ExperimentConfig};
use qudit_qaoa::graph::known_max_cut;
use qudit_qaoa::io::{write_json, Instance};
use qudit_qaoa::oracle::statevector_qaoa1;
use qudit_qaoa::optimizer::LocalSearch;
use qudit_qaoa::{
    generate_ensemble_graph, rqaoa, AngleOptimizer, Angles, AutoOptimizer, EnsembleConfig, GridSearch, Hamiltonian64,
    Qaoa1,
};

#[derive(Parser)]
#[command(name = "qudit-qaoa", version, about = "Level-1 qudit QAOA and recursive QAOA for Max-k-Cut")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample planted 3-colorable 2d-regular graphs.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Optimize level-1 angles for a graph or Hamiltonian file.
    Optimize {
        #[arg(long, alias = "graph")]
        hamiltonian: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 50)]
        grid: usize,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recursive QAOA down to a brute-forced core.
    Rqaoa {
        #[arg(long, alias = "hamiltonian")]
        graph: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = qudit_qaoa::rqaoa::DEFAULT_CUTOFF)]
        cutoff: usize,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact state-vector energy for small instances.
    Oracle {
        #[arg(long, alias = "hamiltonian")]
        graph: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        /// Comma separated `beta_0,..,beta_{k-1},gamma`; optimized when absent.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        angles: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// SDP relaxation plus randomized sector rounding.
    Newman {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full benchmark sweep driven by a JSON config.
    Experiment {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit<S: Serialize>(out: Option<&Path>, value: &S) -> Result<()> {
    match out {
        Some(path) => write_json(path, value).with_context(|| format!("writing {}", path.display())),
        None => {
            println!("{}", serde_json::to_string_pretty(value)?);
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<Instance> {
    Instance::load(path).with_context(|| format!("reading {}", path.display()))
}

fn optimizer(grid: usize, seed: u64) -> AutoOptimizer {
    AutoOptimizer {
        grid: GridSearch::with_grid(grid),
        local: LocalSearch { seed, ..LocalSearch::default() },
    }
}

/// `value / |E|` for planted graphs, where the optimum is known.
fn ratio(instance: &Instance, value: f64) -> Option<f64> {
    let g = instance.graph()?;
    let best = known_max_cut(g).ok()?;
    (best > 0).then(|| value / best as f64)
}

fn generate(n: usize, d: usize, count: usize, seed: u64, out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)?;
    let mut entries = Vec::with_capacity(count);
    for index in 0..count {
        let graph_seed = graph_seed(seed, n, d, index);
        let g = generate_ensemble_graph(&EnsembleConfig::new(n, d, graph_seed))
            .with_context(|| format!("graph {index} (n={n}, d={d})"))?;
        let file = format!("n{n}-d{d}-{index:02}.json");
        write_json(&out.join(&file), &g)?;
        entries.push(json!({
            "file": file, "n": n, "d": d, "index": index,
            "seed": graph_seed, "edges": g.num_edges(),
        }));
    }
    write_json(
        &out.join("manifest.json"),
        &json!({ "master_seed": seed, "n": n, "d": d, "graphs": entries }),
    )?;
    eprintln!("wrote {count} graphs to {}", out.display());
    Ok(())
}

fn oracle(instance: &Instance, h: &Hamiltonian64, angles: Option<Vec<f64>>, out: Option<&Path>) -> Result<()> {
    let k = h.k();
    let angles = match angles {
        Some(mut v) => {
            if v.len() != k + 1 {
                bail!("--angles needs {} values (k betas then gamma), got {}", k + 1, v.len());
            }
            let gamma = v.pop().unwrap();
            Angles::new(v, gamma)
        }
        None => optimizer(50, 0x5eed).optimize(h)?.angles,
    };
    let psi = statevector_qaoa1(h, &angles)?;
    let exact = psi.energy(h);
    let engine = Qaoa1::new(h).energy(&angles)?;
    emit(
        out,
        &json!({
            "angles": angles,
            "energy": exact,
            "engine_energy": engine,
            "difference": (exact - engine).abs(),
            "ratio": ratio(instance, exact),
        }),
    )
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Generate { n, d, count, seed, out } => generate(n, d, count, seed, &out),
        Command::Optimize { hamiltonian, k, grid, seed, out } => {
            let instance = load(&hamiltonian)?;
            let h = instance.hamiltonian(k)?;
            let opt = optimizer(grid, seed);
            let result = opt.optimize(&h)?;
            emit(
                out.as_deref(),
                &json!({
                    "k": h.k(),
                    "method": if AutoOptimizer::is_heuristic(h.k()) { "local-search" } else { "grid-search" },
                    "angles": result.angles,
                    "energy": result.energy,
                    "ratio": ratio(&instance, result.energy),
                    "trace": result.trace,
                }),
            )
        }
        Command::Rqaoa { graph, k, cutoff, seed, out } => {
            let instance = load(&graph)?;
            let h = instance.hamiltonian(k)?;
            let result = rqaoa::run(&h, cutoff, &optimizer(50, seed))?;
            let colors: Vec<usize> = result.coloring.assignment.values().copied().collect();
            emit(
                out.as_deref(),
                &json!({
                    "k": h.k(),
                    "cutoff": cutoff,
                    "value": result.value,
                    "ratio": ratio(&instance, result.value),
                    "coloring": colors,
                    "residual_value": result.residual_value,
                    "trail": result.trail,
                    "steps": result.steps,
                }),
            )
        }
        Command::Oracle { graph, k, angles, out } => {
            let instance = load(&graph)?;
            let h = instance.hamiltonian(k)?;
            oracle(&instance, &h, angles, out.as_deref())
        }
        Command::Newman { graph, k, samples, seed, out } => {
            let instance = load(&graph)?;
            let Some(g) = instance.graph() else {
                bail!("the SDP baseline needs a graph file");
            };
            let config = SdpConfig { seed, ..SdpConfig::default() };
            let stats = newman_best_of(g, k, samples, seed, &config)?;
            let best = stats.best;
            let mut value = serde_json::to_value(&stats)?;
            value["ratio"] = json!(ratio(&instance, best));
            emit(out.as_deref(), &value)
        }
        Command::Experiment { config, out } => {
            let mut cfg: ExperimentConfig = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
                }
                None => ExperimentConfig::default(),
            };
            if let Some(dir) = out {
                cfg.output_dir = dir;
            }
            let result = run_experiment(&cfg)?;
            let failed = result.rows.iter().filter(|r| !r.is_ok()).count();
            eprintln!(
                "{} graphs, {failed} failed; results in {}",
                result.rows.len(),
                cfg.output_dir.display()
            );
            Ok(())
        }
    }
}
