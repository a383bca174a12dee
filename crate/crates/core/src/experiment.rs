//! End-to-end experiment runners behind the CLI subcommands. Each returns
//! the exact bytes the CLI writes, so reruns can be compared directly.

use serde::Serialize;

use crate::coherence::{coherence, coherence_spectral, CoherenceValue};
use crate::error::{Error, Result};
use crate::generate::{generate, GeneratorSpec, DEFAULT_ER_SCALE};
use crate::graph::{CandidateEdge, Edge, Graph};
use crate::greedy::{self, Algorithm, GreedyOptions, SelectionReport};
use crate::io::{to_json, BenchmarkRecord, ReportFile};
use crate::oracle::{self, OracleResult, SimConfig, SimulationEstimate, SubmodularityReport};
use crate::tree;

/// Parameters of one run, echoed verbatim into its report.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub command: String,
    pub input: Option<String>,
    pub output: Option<String>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub generator: Option<GeneratorSpec>,
    pub algorithm: Option<String>,
    pub seed: Option<u64>,
    /// Weight given to candidate edges that have no explicit weight.
    pub weight: f64,
}

impl ExperimentConfig {
    pub fn new(command: &str) -> Self {
        ExperimentConfig {
            command: command.to_string(),
            weight: 1.0,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgorithmChoice {
    Naive,
    Lazy,
    Both,
}

impl std::str::FromStr for AlgorithmChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(AlgorithmChoice::Naive),
            "lazy" => Ok(AlgorithmChoice::Lazy),
            "both" => Ok(AlgorithmChoice::Both),
            other => Err(Error::InvalidParameter(format!("unknown algorithm '{other}'"))),
        }
    }
}

impl AlgorithmChoice {
    pub fn algorithms(&self) -> Vec<Algorithm> {
        match self {
            AlgorithmChoice::Naive => vec![Algorithm::Naive],
            AlgorithmChoice::Lazy => vec![Algorithm::Lazy],
            AlgorithmChoice::Both => vec![Algorithm::Naive, Algorithm::Lazy],
        }
    }
}

fn check_weight(w: f64) -> Result<f64> {
    if w > 0.0 && w.is_finite() {
        Ok(w)
    } else {
        Err(Error::InvalidParameter(format!("default weight must be positive, got {w}")))
    }
}

/// Everything a greedy run produces.
#[derive(Debug, Clone)]
pub struct GreedyOutcome {
    pub reports: Vec<SelectionReport>,
    /// Input graph plus the edges of the last report.
    pub graph: Graph,
    /// JSON: one object, or an array of objects for `both`.
    pub json: String,
}

pub fn run_greedy(g: &Graph, cfg: &ExperimentConfig, choice: AlgorithmChoice, timings: bool) -> Result<GreedyOutcome> {
    let k = cfg.k.ok_or_else(|| Error::InvalidParameter("greedy needs k".into()))?;
    let w = check_weight(cfg.weight)?;
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let candidates = g.candidate_edges(|_, _| w);
    let before = coherence(g);
    let mut reports = Vec::new();
    let mut files = Vec::new();
    let mut graph = g.clone();
    for alg in choice.algorithms() {
        let mut report = greedy::run(g, &candidates, k, alg, &GreedyOptions::default())?;
        report.seed = cfg.seed;
        graph = g.clone();
        for e in &report.selected {
            graph.insert_edge(*e)?;
        }
        files.push(ReportFile::new(&report, cfg.clone(), before, coherence(&graph), timings));
        reports.push(report);
    }
    let json = if files.len() == 1 { to_json(&files[0])? } else { to_json(&files)? };
    Ok(GreedyOutcome { reports, graph, json })
}

/// Output of `build-tree`: the tree (or extended graph) and its report.
#[derive(Debug, Clone)]
pub struct TreeOutcome {
    pub report: SelectionReport,
    pub graph: Graph,
    pub json: String,
}

/// Builds a tree on `n` nodes; pairs missing from `weights` take `cfg.weight`.
pub fn run_build_tree(n: usize, weights: Option<&Graph>, cfg: &ExperimentConfig, timings: bool) -> Result<TreeOutcome> {
    let default = cfg.weight;
    if let Some(wg) = weights {
        if wg.n() != n {
            return Err(Error::InvalidParameter(format!(
                "weight file has {} nodes, expected {n}",
                wg.n()
            )));
        }
    }
    let weight_fn = |u: usize, v: usize| weights.and_then(|wg| wg.weight(u, v)).unwrap_or(default);
    let (graph, mut report) = tree::build_tree(n, weight_fn)?;
    report.seed = cfg.seed;
    let file = ReportFile::new(&report, cfg.clone(), CoherenceValue::disconnected(), coherence(&graph), timings);
    Ok(TreeOutcome {
        json: to_json(&file)?,
        report,
        graph,
    })
}

/// Attaches `new_nodes` nodes to a connected graph with uniform weight `cfg.weight`.
pub fn run_attach(g: &Graph, new_nodes: usize, cfg: &ExperimentConfig, timings: bool) -> Result<TreeOutcome> {
    let w = check_weight(cfg.weight)?;
    let (graph, mut report) = tree::attach_nodes(g, new_nodes, |_, _| w)?;
    report.seed = cfg.seed;
    let file = ReportFile::new(&report, cfg.clone(), coherence(g), coherence(&graph), timings);
    Ok(TreeOutcome {
        json: to_json(&file)?,
        report,
        graph,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleRecord {
    pub mode: &'static str,
    pub config: ExperimentConfig,
    pub best_value: f64,
    pub best_coherence: f64,
    pub best_witness: Vec<(usize, usize, f64)>,
    pub instances_examined: u64,
}

impl OracleRecord {
    fn new(mode: &'static str, config: ExperimentConfig, r: OracleResult) -> Self {
        OracleRecord {
            mode,
            config,
            best_value: r.best_value,
            best_coherence: 0.5 * r.best_value,
            best_witness: r.best_witness.iter().map(|e| (e.u, e.v, e.w)).collect(),
            instances_examined: r.instances_examined,
        }
    }
}

/// Exhaustive best k-subset of the absent edges of `g`.
pub fn run_oracle_subset(g: &Graph, cfg: &ExperimentConfig) -> Result<(OracleResult, String)> {
    let k = cfg.k.ok_or_else(|| Error::InvalidParameter("oracle needs k".into()))?;
    let w = check_weight(cfg.weight)?;
    let r = oracle::best_subset_bruteforce(g, &g.candidate_edges(|_, _| w), k)?;
    let json = to_json(&OracleRecord::new("subset", cfg.clone(), r.clone()))?;
    Ok((r, json))
}

/// Exhaustive best labeled tree on `cfg.n` nodes with uniform weight.
pub fn run_oracle_tree(cfg: &ExperimentConfig) -> Result<(OracleResult, String)> {
    let n = cfg.n.ok_or_else(|| Error::InvalidParameter("tree oracle needs n".into()))?;
    let w = check_weight(cfg.weight)?;
    let r = oracle::best_tree_bruteforce(n, |_, _| w)?;
    let json = to_json(&OracleRecord::new("tree", cfg.clone(), r.clone()))?;
    Ok((r, json))
}

#[derive(Debug, Clone, Serialize)]
struct SubmodularityRecord<'a> {
    mode: &'static str,
    config: &'a ExperimentConfig,
    #[serde(flatten)]
    report: SubmodularityReport,
}

pub fn run_oracle_submodularity(
    g: &Graph,
    samples: usize,
    cfg: &ExperimentConfig,
) -> Result<(SubmodularityReport, String)> {
    let seed = cfg
        .seed
        .ok_or_else(|| Error::InvalidParameter("submodularity sampling needs a seed".into()))?;
    let w = check_weight(cfg.weight)?;
    let r = oracle::submodularity_sample(g, &g.candidate_edges(|_, _| w), samples, seed)?;
    let json = to_json(&SubmodularityRecord {
        mode: "submodularity",
        config: cfg,
        report: r,
    })?;
    Ok((r, json))
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationRecord {
    pub config: ExperimentConfig,
    pub estimate: SimulationEstimate,
    pub analytic_coherence: f64,
    /// `(estimate − analytic) / std_error`.
    pub z_score: f64,
}

/// Monte Carlo coherence estimate; unset budget fields take the defaults
/// of [`SimConfig::default_for`].
pub fn run_simulate(
    g: &Graph,
    cfg: &ExperimentConfig,
    dt: Option<f64>,
    horizon: Option<f64>,
    trials: Option<usize>,
) -> Result<(SimulationRecord, String)> {
    let seed = cfg
        .seed
        .ok_or_else(|| Error::InvalidParameter("simulate needs a seed".into()))?;
    let defaults = SimConfig::default_for(g, seed)?;
    let sim = SimConfig {
        dt: dt.unwrap_or(defaults.dt),
        horizon: horizon.unwrap_or(defaults.horizon),
        trials: trials.unwrap_or(defaults.trials),
        seed,
    };
    let estimate = oracle::simulate_coherence(g, &sim)?;
    let analytic = coherence(g).value;
    let record = SimulationRecord {
        config: cfg.clone(),
        estimate,
        analytic_coherence: analytic,
        z_score: (estimate.coherence_hat - analytic) / estimate.std_error,
    };
    let json = to_json(&record)?;
    Ok((record, json))
}

#[derive(Debug, Clone, Serialize)]
pub struct CoherenceSummary {
    pub n: usize,
    pub edges: usize,
    pub connected: bool,
    /// `null` when disconnected.
    pub coherence: Option<f64>,
    pub trace_pinv: Option<f64>,
    pub coherence_spectral: Option<f64>,
}

pub fn run_coherence(g: &Graph) -> Result<(CoherenceSummary, String)> {
    let c = coherence(g);
    let spectral = coherence_spectral(g).ok().map(|c| c.value);
    let summary = CoherenceSummary {
        n: g.n(),
        edges: g.num_edges(),
        connected: c.is_finite(),
        coherence: c.is_finite().then_some(c.value),
        trace_pinv: c.is_finite().then_some(c.trace_pinv),
        coherence_spectral: spectral,
    };
    let json = to_json(&summary)?;
    Ok((summary, json))
}

#[derive(Debug, Clone, Serialize)]
pub struct GenerateRecord {
    pub generator: GeneratorSpec,
    pub seed: Option<u64>,
    pub attempts: usize,
    pub n: usize,
    pub edges: usize,
}

pub fn run_generate(spec: &GeneratorSpec, seed: Option<u64>) -> Result<(Graph, GenerateRecord)> {
    let seed = match (spec.is_stochastic(), seed) {
        (true, None) => {
            return Err(Error::InvalidParameter("stochastic generators need a seed".into()));
        }
        (_, s) => s,
    };
    let generated = generate(spec, seed.unwrap_or(0))?;
    let record = GenerateRecord {
        generator: *spec,
        seed,
        attempts: generated.attempts,
        n: generated.graph.n(),
        edges: generated.graph.num_edges(),
    };
    Ok((generated.graph, record))
}

/// Naive vs lazy on connected Erdős–Rényi graphs with `k = n`, one pair
/// of rows per size.
pub fn run_benchmark(sizes: &[usize], seed: u64, c: f64) -> Result<Vec<BenchmarkRecord>> {
    if sizes.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter("benchmark sizes must be ascending".into()));
    }
    let mut rows = Vec::new();
    for &n in sizes {
        let g = generate(&GeneratorSpec::Er { n, c }, seed)?.graph;
        let candidates: Vec<CandidateEdge> = g.candidate_edges(|_, _| 1.0);
        for alg in [Algorithm::Naive, Algorithm::Lazy] {
            let r = greedy::run(&g, &candidates, n, alg, &GreedyOptions::default())?;
            rows.push(BenchmarkRecord {
                n,
                algorithm: alg,
                evals: r.total_evals(),
                seconds: r.total_seconds(),
                trace_before: r.trace_before,
                trace_after: r.trace_after,
            });
        }
    }
    Ok(rows)
}

pub fn default_er(n: usize) -> GeneratorSpec {
    GeneratorSpec::Er { n, c: DEFAULT_ER_SCALE }
}

/// Edges as `[u, v, w]` triples, for tests and summaries.
pub fn triples(edges: &[Edge]) -> Vec<(usize, usize, f64)> {
    edges.iter().map(|e| (e.u, e.v, e.w)).collect()
}
