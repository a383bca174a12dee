//! `netcoh`: command-line driver for coherence-optimal topology design.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use netcoh::experiment::{self, AlgorithmChoice, ExperimentConfig};
use netcoh::generate::{GeneratorSpec, DEFAULT_ER_SCALE};
use netcoh::io::{self, benchmark_csv, to_json};
use netcoh::{Error, Graph};

#[derive(Parser, Debug)]
#[command(name = "netcoh", version, about = "Design network topologies for optimal coherence")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a graph and write it as an edge list.
    Generate(GenerateArgs),
    /// Print the coherence of a graph.
    Coherence(InputArgs),
    /// Greedily add k edges to minimize trace(L†).
    GreedyAdd(GreedyArgs),
    /// Grow a small-trace spanning tree, or attach new nodes to a graph.
    BuildTree(TreeArgs),
    /// Brute-force oracles: best k-subset, best labeled tree, submodularity sampling.
    Oracle(OracleArgs),
    /// Monte Carlo estimate of coherence from the noisy consensus dynamics.
    Simulate(SimulateArgs),
    /// Naive vs lazy greedy on Erdős–Rényi graphs with k = n; writes CSV.
    Benchmark(BenchmarkArgs),
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Kind {
    Er,
    Cycle,
    Ba,
    Complete,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long)]
    kind: Kind,
    #[arg(long)]
    n: usize,
    /// Erdős–Rényi scale: p = c·ln(n)/n.
    #[arg(long, default_value_t = DEFAULT_ER_SCALE)]
    c: f64,
    /// Barabási–Albert edges per new node.
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Edge-list destination (stdout if omitted).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args, Debug)]
struct GreedyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    k: usize,
    /// naive, lazy, or both (writes a JSON array of two reports).
    #[arg(long, default_value = "lazy")]
    alg: String,
    /// Weight of every candidate edge.
    #[arg(long, default_value_t = 1.0)]
    weight: f64,
    /// Recorded in the report.
    #[arg(long)]
    seed: Option<u64>,
    /// Report destination (stdout if omitted).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write the augmented graph as an edge list.
    #[arg(long)]
    output_graph: Option<PathBuf>,
    /// Write zeros for wall times so reruns are byte-identical.
    #[arg(long)]
    no_timings: bool,
}

#[derive(Args, Debug)]
struct TreeArgs {
    /// Number of nodes when building from scratch.
    #[arg(long, conflicts_with = "input")]
    n: Option<usize>,
    /// Edge list of pairwise weights; absent pairs take --weight.
    #[arg(long, conflicts_with = "input")]
    weights: Option<PathBuf>,
    /// Existing connected graph to extend with --attach new nodes.
    #[arg(long, requires = "attach")]
    input: Option<PathBuf>,
    #[arg(long)]
    attach: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    weight: f64,
    #[arg(long)]
    seed: Option<u64>,
    /// Edge-list destination for the resulting graph (stdout if omitted).
    #[arg(long)]
    output: Option<PathBuf>,
    /// JSON report destination.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    no_timings: bool,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum OracleMode {
    Subset,
    Tree,
    Submodularity,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long, value_enum, default_value = "subset")]
    mode: OracleMode,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 1.0)]
    weight: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    seed: u64,
    /// Step size (default 0.01/λ_max).
    #[arg(long)]
    dt: Option<f64>,
    /// Time horizon per trial (default 20/λ₂).
    #[arg(long)]
    horizon: Option<f64>,
    /// Independent trajectories (default 400).
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchmarkArgs {
    /// Ascending comma-separated node counts, e.g. 40,80,120.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    sizes: Vec<usize>,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_ER_SCALE)]
    c: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn path_str(p: &Option<PathBuf>) -> Option<String> {
    p.as_ref().map(|p| p.display().to_string())
}

fn load(path: &Path) -> Result<Graph, Error> {
    io::read_edge_list(path)
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Generate(a) => {
            let spec = match a.kind {
                Kind::Er => GeneratorSpec::Er { n: a.n, c: a.c },
                Kind::Cycle => GeneratorSpec::Cycle { n: a.n },
                Kind::Ba => GeneratorSpec::Ba { n: a.n, m: a.m },
                Kind::Complete => GeneratorSpec::Complete { n: a.n },
            };
            let (g, record) = experiment::run_generate(&spec, a.seed)?;
            emit(a.output.as_deref(), &io::write_edge_list(&g))?;
            eprint!("{}", to_json(&record)?);
        }
        Command::Coherence(a) => {
            let (_, json) = experiment::run_coherence(&load(&a.input)?)?;
            print!("{json}");
        }
        Command::GreedyAdd(a) => {
            let choice: AlgorithmChoice = a.alg.parse()?;
            let g = load(&a.input)?;
            let mut cfg = ExperimentConfig::new("greedy-add");
            cfg.input = path_str(&Some(a.input.clone()));
            cfg.output = path_str(&a.output);
            cfg.n = Some(g.n());
            cfg.k = Some(a.k);
            cfg.algorithm = Some(a.alg.clone());
            cfg.seed = a.seed;
            cfg.weight = a.weight;
            let out = experiment::run_greedy(&g, &cfg, choice, !a.no_timings)?;
            emit(a.output.as_deref(), &out.json)?;
            if let Some(p) = &a.output_graph {
                io::save_edge_list(p, &out.graph)?;
            }
        }
        Command::BuildTree(a) => {
            let mut cfg = ExperimentConfig::new("build-tree");
            cfg.output = path_str(&a.output);
            cfg.seed = a.seed;
            cfg.weight = a.weight;
            cfg.algorithm = Some("tree".into());
            let out = match (&a.input, a.n) {
                (Some(input), _) => {
                    let g = load(input)?;
                    cfg.input = path_str(&a.input);
                    cfg.n = Some(g.n());
                    cfg.k = a.attach;
                    experiment::run_attach(&g, a.attach.unwrap_or(0), &cfg, !a.no_timings)?
                }
                (None, Some(n)) => {
                    let weights = a.weights.as_deref().map(load).transpose()?;
                    cfg.input = path_str(&a.weights);
                    cfg.n = Some(n);
                    experiment::run_build_tree(n, weights.as_ref(), &cfg, !a.no_timings)?
                }
                (None, None) => {
                    return Err(Error::InvalidParameter("build-tree needs --n or --input".into()));
                }
            };
            emit(a.output.as_deref(), &io::write_edge_list(&out.graph))?;
            if let Some(p) = &a.report {
                std::fs::write(p, &out.json)?;
            }
        }
        Command::Oracle(a) => {
            let mut cfg = ExperimentConfig::new("oracle");
            cfg.input = path_str(&a.input);
            cfg.output = path_str(&a.output);
            cfg.k = a.k;
            cfg.n = a.n;
            cfg.seed = a.seed;
            cfg.weight = a.weight;
            let need_input = || {
                a.input
                    .as_deref()
                    .ok_or_else(|| Error::InvalidParameter("this oracle mode needs --input".into()))
                    .and_then(load)
            };
            let json = match a.mode {
                OracleMode::Subset => experiment::run_oracle_subset(&need_input()?, &cfg)?.1,
                OracleMode::Tree => experiment::run_oracle_tree(&cfg)?.1,
                OracleMode::Submodularity => {
                    experiment::run_oracle_submodularity(&need_input()?, a.samples, &cfg)?.1
                }
            };
            emit(a.output.as_deref(), &json)?;
        }
        Command::Simulate(a) => {
            let g = load(&a.input)?;
            let mut cfg = ExperimentConfig::new("simulate");
            cfg.input = path_str(&Some(a.input.clone()));
            cfg.output = path_str(&a.output);
            cfg.n = Some(g.n());
            cfg.seed = Some(a.seed);
            let (_, json) = experiment::run_simulate(&g, &cfg, a.dt, a.horizon, a.trials)?;
            emit(a.output.as_deref(), &json)?;
        }
        Command::Benchmark(a) => {
            let rows = experiment::run_benchmark(&a.sizes, a.seed, a.c)?;
            emit(a.output.as_deref(), &benchmark_csv(&rows))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::InvalidParameter(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
