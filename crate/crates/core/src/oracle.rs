//! Independent oracles: exhaustive search, submodularity sampling and a
//! Monte Carlo simulation of the noisy consensus dynamics.
//!
//! Every objective value here comes from a fresh pseudoinverse of the full
//! Laplacian; nothing reuses the rank-one update path under test.

use itertools::Itertools;
use nalgebra::{DVector, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CandidateEdge, Edge, Graph};
use crate::pinv::PinvState;

/// Largest subset count `best_subset_bruteforce` will enumerate.
pub const SUBSET_BUDGET: u128 = 1_000_000;

/// Largest `n` for labeled-tree enumeration (8⁶ = 262144 trees).
pub const MAX_TREE_ORACLE_N: usize = 8;

/// Diminishing-returns slack.
pub const SUBMODULAR_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub best_value: f64,
    pub best_witness: Vec<Edge>,
    pub instances_examined: u64,
}

/// `trace(L†)` of `g` by full recomputation; `+∞` when disconnected.
pub fn full_trace(g: &Graph) -> f64 {
    if !g.is_connected() {
        return f64::INFINITY;
    }
    PinvState::from_graph(g)
        .map(|s| s.trace())
        .unwrap_or(f64::INFINITY)
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn with_edges(g: &Graph, extra: &[&CandidateEdge]) -> Result<Graph> {
    let mut out = g.clone();
    for c in extra {
        out.insert_edge(c.edge())?;
    }
    Ok(out)
}

/// Exact minimizer of `trace(L†)` over every `k`-subset of `candidates`.
/// Ties keep the first subset in lexicographic index order.
pub fn best_subset_bruteforce(g: &Graph, candidates: &[CandidateEdge], k: usize) -> Result<OracleResult> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let count = binomial(candidates.len() as u64, k as u64);
    if count > SUBSET_BUDGET {
        return Err(Error::BudgetExceeded {
            count,
            budget: SUBSET_BUDGET,
        });
    }
    if count == 0 {
        return Err(Error::InvalidParameter(format!(
            "k = {k} exceeds {} candidates",
            candidates.len()
        )));
    }
    let subsets: Vec<Vec<&CandidateEdge>> = candidates.iter().combinations(k).collect();
    let values: Vec<f64> = subsets
        .par_iter()
        .map(|s| with_edges(g, s).map(|h| full_trace(&h)))
        .collect::<Result<_>>()?;
    let best = argmin_first(&values);
    Ok(OracleResult {
        best_value: values[best],
        best_witness: subsets[best].iter().map(|c| c.edge()).collect(),
        instances_examined: values.len() as u64,
    })
}

fn argmin_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

/// Decodes a Prüfer sequence (length `n − 2`, entries in `0..n`) into the
/// edge list of its labeled tree.
pub fn prufer_decode(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    assert!(n >= 2 && seq.len() == n - 2, "Prüfer sequence length must be n - 2");
    let mut degree = vec![1usize; n];
    for &x in seq {
        degree[x] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &x in seq {
        let leaf = (0..n).find(|&i| degree[i] == 1).expect("a leaf always exists");
        edges.push((leaf.min(x), leaf.max(x)));
        degree[leaf] -= 1;
        degree[x] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&i| degree[i] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

fn prufer_from_index(mut index: u64, n: usize) -> Vec<usize> {
    let mut seq = vec![0; n - 2];
    for slot in seq.iter_mut().rev() {
        *slot = (index % n as u64) as usize;
        index /= n as u64;
    }
    seq
}

/// Exact minimizer of `trace(L†)` over all `n^(n−2)` labeled trees with
/// edge weights from `weight_fn`.
pub fn best_tree_bruteforce(n: usize, weight_fn: impl Fn(usize, usize) -> f64 + Sync) -> Result<OracleResult> {
    if !(2..=MAX_TREE_ORACLE_N).contains(&n) {
        return Err(Error::InvalidParameter(format!(
            "tree oracle needs 2 <= n <= {MAX_TREE_ORACLE_N}, got {n}"
        )));
    }
    let total = (n as u64).pow(n as u32 - 2);
    let tree_of = |index: u64| -> Result<Graph> {
        let edges = prufer_decode(&prufer_from_index(index, n), n);
        Graph::new(n, edges.into_iter().map(|(u, v)| (u, v, weight_fn(u, v))))
    };
    let (best_value, best_index) = (0..total)
        .into_par_iter()
        .map(|i| tree_of(i).map(|t| (full_trace(&t), i)))
        .try_reduce(
            || (f64::INFINITY, u64::MAX),
            |a, b| Ok(if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a }),
        )?;
    Ok(OracleResult {
        best_value,
        best_witness: tree_of(best_index)?.edges().to_vec(),
        instances_examined: total,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubmodularityReport {
    pub samples: usize,
    pub violations: usize,
    /// Largest `gain(e|B) − gain(e|A)` seen (negative when all strict).
    pub max_excess: f64,
    pub seed: u64,
}

/// Samples chains `A ⊆ B ⊆ candidates`, `e ∉ B`, and counts violations of
/// `gain(e|A) ≥ gain(e|B) − 1e−9` for the objective `−trace(L†)`.
pub fn submodularity_sample(
    g: &Graph,
    candidates: &[CandidateEdge],
    samples: usize,
    seed: u64,
) -> Result<SubmodularityReport> {
    submodularity_sample_with(g, candidates, samples, seed, |h| -full_trace(h))
}

/// As [`submodularity_sample`] for an arbitrary set function `f` (to be
/// maximized); `gain(e|S) = f(S ∪ {e}) − f(S)`.
pub fn submodularity_sample_with(
    g: &Graph,
    candidates: &[CandidateEdge],
    samples: usize,
    seed: u64,
    f: impl Fn(&Graph) -> f64,
) -> Result<SubmodularityReport> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if candidates.is_empty() {
        return Err(Error::InvalidParameter("no candidates to sample".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SubmodularityReport {
        samples,
        violations: 0,
        max_excess: f64::NEG_INFINITY,
        seed,
    };
    let mut order: Vec<&CandidateEdge> = candidates.iter().collect();
    for _ in 0..samples {
        order.shuffle(&mut rng);
        let (e, rest) = order.split_first().unwrap();
        let b_len = rng.random_range(0..=rest.len());
        let a_len = rng.random_range(0..=b_len);
        let (a, b) = (&rest[..a_len], &rest[..b_len]);
        let gain = |s: &[&CandidateEdge]| -> Result<f64> {
            let base = with_edges(g, s)?;
            let plus = base.add_edge(e.edge())?;
            Ok(f(&plus) - f(&base))
        };
        let excess = gain(b)? - gain(a)?;
        report.max_excess = report.max_excess.max(excess);
        if excess > SUBMODULAR_SLACK {
            report.violations += 1;
        }
    }
    Ok(report)
}

/// `gain(e|B) − gain(e|A)` for the objective `−trace(L†)`; positive values
/// are diminishing-returns violations. `A` must be a subset of `B`.
pub fn diminishing_returns_excess(
    g: &Graph,
    e: &CandidateEdge,
    a: &[CandidateEdge],
    b: &[CandidateEdge],
) -> Result<f64> {
    let gain = |s: &[CandidateEdge]| -> Result<f64> {
        let refs: Vec<&CandidateEdge> = s.iter().collect();
        let base = with_edges(g, &refs)?;
        Ok(full_trace(&base) - full_trace(&base.add_edge(e.edge())?))
    };
    Ok(gain(b)? - gain(a)?)
}

/// Step size, horizon and trial budget of a consensus simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    pub horizon: f64,
    pub trials: usize,
    pub seed: u64,
}

impl SimConfig {
    /// Default budget: `dt = 0.01/λ_max`, `horizon = 20/λ₂`, 400 trials.
    pub fn default_for(g: &Graph, seed: u64) -> Result<Self> {
        let (l2, lmax) = spectral_extremes(g)?;
        Ok(SimConfig {
            dt: 0.01 / lmax,
            horizon: 20.0 / l2,
            trials: 400,
            seed,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationEstimate {
    pub coherence_hat: f64,
    pub std_error: f64,
    pub trials: usize,
    pub horizon: f64,
    pub dt: f64,
    pub seed: u64,
}

/// `(λ₂, λ_max)` of a connected graph's Laplacian.
pub fn spectral_extremes(g: &Graph) -> Result<(f64, f64)> {
    if g.n() < 2 || !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(g.laplacian()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok((ev[1], ev[ev.len() - 1]))
}

/// Estimates coherence as the steady-state `E[xᵀPx]` of
/// `dx = −Lx dt + dW`, `x(0) = 0`, integrated by Euler–Maruyama. Each
/// trial averages `xᵀPx` over the second half of its trajectory.
pub fn simulate_coherence(g: &Graph, cfg: &SimConfig) -> Result<SimulationEstimate> {
    let (l2, lmax) = spectral_extremes(g)?;
    if !(cfg.dt > 0.0) || cfg.dt > 0.1 / lmax * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "dt = {} must lie in (0, 0.1/λ_max = {}]",
            cfg.dt,
            0.1 / lmax
        )));
    }
    if cfg.horizon < 10.0 / l2 * (1.0 - 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "horizon = {} below mixing time 10/λ₂ = {}",
            cfg.horizon,
            10.0 / l2
        )));
    }
    if cfg.trials < 2 {
        return Err(Error::InvalidParameter("need at least 2 trials".into()));
    }
    let steps = (cfg.horizon / cfg.dt).ceil() as usize;
    let burn_in = steps / 2;
    let per_trial: Vec<f64> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(g, cfg.dt, steps, burn_in, cfg.seed, t as u64))
        .collect();
    let m = per_trial.len() as f64;
    let mean = per_trial.iter().sum::<f64>() / m;
    let var = per_trial.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    Ok(SimulationEstimate {
        coherence_hat: mean,
        std_error: (var / m).sqrt(),
        trials: cfg.trials,
        horizon: cfg.horizon,
        dt: cfg.dt,
        seed: cfg.seed,
    })
}

fn run_trial(g: &Graph, dt: f64, steps: usize, burn_in: usize, seed: u64, trial: u64) -> f64 {
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let noise_scale = dt.sqrt();
    let mut x = DVector::<f64>::zeros(n);
    let mut drift = DVector::<f64>::zeros(n);
    let mut acc = 0.0;
    for step in 0..steps {
        drift.fill(0.0);
        for e in g.edges() {
            let flux = e.w * (x[e.u] - x[e.v]);
            drift[e.u] -= flux;
            drift[e.v] += flux;
        }
        for i in 0..n {
            let z: f64 = rng.sample(StandardNormal);
            x[i] += dt * drift[i] + noise_scale * z;
        }
        if step >= burn_in {
            let mean = x.sum() / n as f64;
            acc += x.iter().map(|xi| (xi - mean).powi(2)).sum::<f64>();
        }
    }
    acc / (steps - burn_in) as f64
}
