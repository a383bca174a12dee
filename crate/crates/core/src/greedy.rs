//! Greedy edge selection minimizing `trace(L†)`.
//!
//! Both variants maximize the trace decrease of a connected graph, one
//! edge per iteration, using the O(n) gain formula against a maintained
//! pseudoinverse. The lazy variant keeps stale gains in a max-heap; since
//! gains never increase as edges are added, a freshly re-evaluated top
//! element dominates everything below it.
//!
//! Selection rule shared by both: let `g_max` be the largest fresh gain;
//! every candidate whose gain is within `TIE_RTOL·g_max` of it counts as
//! tied, and the lexicographically smallest `(u, v)` among them wins.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CandidateEdge, Edge, Graph, IncidenceRow};
use crate::pinv::PinvState;

/// Relative width of the tie window.
pub const TIE_RTOL: f64 = 1e-10;

/// Accepted edges between full refactorizations of the pseudoinverse.
pub const DEFAULT_REFACTOR_EVERY: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Naive,
    Lazy,
    /// Tree construction; its `gains` are trace increases.
    Tree,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Naive => "naive",
            Algorithm::Lazy => "lazy",
            Algorithm::Tree => "tree",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Algorithm::Naive),
            "lazy" => Ok(Algorithm::Lazy),
            "tree" => Ok(Algorithm::Tree),
            other => Err(Error::InvalidParameter(format!("unknown algorithm '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GreedyOptions {
    pub refactor_every: usize,
    /// Evaluate the naive full sweep on the rayon pool.
    pub parallel: bool,
}

impl Default for GreedyOptions {
    fn default() -> Self {
        GreedyOptions {
            refactor_every: DEFAULT_REFACTOR_EVERY,
            parallel: false,
        }
    }
}

/// Audit trail of one greedy run. Per-iteration vectors are index-aligned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub algorithm: Algorithm,
    pub selected: Vec<Edge>,
    /// Realized trace decrease of each accepted edge.
    pub gains: Vec<f64>,
    pub trace_before: f64,
    pub trace_after: f64,
    pub eval_counts: Vec<usize>,
    pub wall_times: Vec<f64>,
    pub seed: Option<u64>,
}

impl SelectionReport {
    pub fn total_evals(&self) -> usize {
        self.eval_counts.iter().sum()
    }

    pub fn total_seconds(&self) -> f64 {
        self.wall_times.iter().sum()
    }

    /// Objective value of the selection: total trace decrease.
    pub fn objective(&self) -> f64 {
        self.trace_before - self.trace_after
    }
}

pub fn naive_greedy(g: &Graph, candidates: &[CandidateEdge], k: usize) -> Result<SelectionReport> {
    run(g, candidates, k, Algorithm::Naive, &GreedyOptions::default())
}

pub fn lazy_greedy(g: &Graph, candidates: &[CandidateEdge], k: usize) -> Result<SelectionReport> {
    run(g, candidates, k, Algorithm::Lazy, &GreedyOptions::default())
}

/// Selects up to `k` edges from `candidates` with the requested algorithm.
pub fn run(
    g: &Graph,
    candidates: &[CandidateEdge],
    k: usize,
    algorithm: Algorithm,
    opts: &GreedyOptions,
) -> Result<SelectionReport> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    validate_candidates(g, candidates)?;
    let mut state = PinvState::from_graph(g)?;
    let mut report = SelectionReport {
        algorithm,
        selected: Vec::new(),
        gains: Vec::new(),
        trace_before: state.trace(),
        trace_after: state.trace(),
        eval_counts: Vec::new(),
        wall_times: Vec::new(),
        seed: None,
    };
    let k = k.min(candidates.len());
    match algorithm {
        Algorithm::Naive => naive_loop(&mut state, candidates, k, opts, &mut report)?,
        Algorithm::Lazy => lazy_loop(&mut state, candidates, k, opts, &mut report)?,
        Algorithm::Tree => {
            return Err(Error::InvalidParameter(
                "tree construction is not an edge-addition algorithm".into(),
            ))
        }
    }
    report.trace_after = state.trace();
    Ok(report)
}

fn validate_candidates(g: &Graph, candidates: &[CandidateEdge]) -> Result<()> {
    let mut keys = Vec::with_capacity(candidates.len());
    for c in candidates {
        if c.u >= g.n() || c.v >= g.n() {
            return Err(Error::NodeOutOfRange {
                index: c.u.max(c.v),
                n: g.n(),
            });
        }
        if g.contains_edge(c.u, c.v) {
            return Err(Error::DuplicateEdge(c.u, c.v));
        }
        IncidenceRow::new(c.u, c.v, c.w)?;
        keys.push(c.key());
    }
    keys.sort_unstable();
    if let Some(p) = keys.windows(2).find(|p| p[0] == p[1]) {
        return Err(Error::DuplicateEdge(p[0].0, p[0].1));
    }
    Ok(())
}

fn row_of(c: &CandidateEdge) -> IncidenceRow {
    IncidenceRow {
        u: c.u,
        v: c.v,
        s: c.w.sqrt(),
    }
}

pub(crate) fn tie_floor(g_max: f64) -> f64 {
    g_max - TIE_RTOL * g_max.abs()
}

/// Applies the accepted edge and the refactorization policy.
fn accept(
    state: &mut PinvState,
    edge: &CandidateEdge,
    opts: &GreedyOptions,
    report: &mut SelectionReport,
) -> Result<()> {
    let gain = state.apply_rank_one(&row_of(edge))?;
    report.selected.push(edge.edge());
    report.gains.push(gain);
    if opts.refactor_every > 0 && report.selected.len() % opts.refactor_every == 0 {
        state.refactorize()?;
    }
    Ok(())
}

fn naive_loop(
    state: &mut PinvState,
    candidates: &[CandidateEdge],
    k: usize,
    opts: &GreedyOptions,
    report: &mut SelectionReport,
) -> Result<()> {
    let mut remaining: Vec<CandidateEdge> = candidates.to_vec();
    for _ in 0..k {
        let start = Instant::now();
        let gains: Vec<f64> = if opts.parallel {
            remaining
                .par_iter()
                .map(|c| state.marginal_trace_decrease(&row_of(c)))
                .collect::<Result<_>>()?
        } else {
            remaining
                .iter()
                .map(|c| state.marginal_trace_decrease(&row_of(c)))
                .collect::<Result<_>>()?
        };
        let g_max = gains.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let floor = tie_floor(g_max);
        let best = (0..remaining.len())
            .filter(|&i| gains[i] >= floor)
            .min_by_key(|&i| remaining[i].key())
            .expect("k is capped by the candidate count");
        let chosen = remaining.swap_remove(best);
        report.eval_counts.push(gains.len());
        accept(state, &chosen, opts, report)?;
        report.wall_times.push(start.elapsed().as_secs_f64());
    }
    Ok(())
}

/// Heap entry ordered by cached gain (descending), then key (ascending).
#[derive(Debug, Clone, Copy)]
struct Entry(CandidateEdge);

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .cached_gain
            .total_cmp(&other.0.cached_gain)
            .then_with(|| other.0.key().cmp(&self.0.key()))
    }
}

/// Max-ordered queue of candidates with stale-gain bookkeeping.
#[derive(Debug, Default)]
pub struct LazyQueue {
    heap: BinaryHeap<Entry>,
}

impl LazyQueue {
    pub fn new() -> Self {
        LazyQueue::default()
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn push(&mut self, c: CandidateEdge) {
        self.heap.push(Entry(c));
    }

    pub fn pop(&mut self) -> Option<CandidateEdge> {
        self.heap.pop().map(|e| e.0)
    }

    pub fn peek(&self) -> Option<&CandidateEdge> {
        self.heap.peek().map(|e| &e.0)
    }

    /// Largest cached gain still queued.
    pub fn max_cached(&self) -> Option<f64> {
        self.peek().map(|c| c.cached_gain)
    }
}

fn refresh(state: &PinvState, c: &mut CandidateEdge, iteration: usize, evals: &mut usize) -> Result<()> {
    if c.stamp != Some(iteration) {
        c.cached_gain = state.marginal_trace_decrease(&row_of(c))?;
        c.stamp = Some(iteration);
        *evals += 1;
    }
    Ok(())
}

fn lazy_loop(
    state: &mut PinvState,
    candidates: &[CandidateEdge],
    k: usize,
    opts: &GreedyOptions,
    report: &mut SelectionReport,
) -> Result<()> {
    let mut queue = LazyQueue::new();
    for it in 0..k {
        let start = Instant::now();
        let mut evals = 0;
        if it == 0 {
            for c in candidates {
                let mut c = *c;
                c.stamp = None;
                refresh(state, &mut c, 0, &mut evals)?;
                queue.push(c);
            }
        }

        // Pop until the top is fresh: it then bounds every queued gain.
        let top = loop {
            let mut c = queue.pop().expect("k is capped by the candidate count");
            if c.stamp == Some(it) {
                break c;
            }
            refresh(state, &mut c, it, &mut evals)?;
            queue.push(c);
        };

        // Refresh everything that could still fall inside the tie window.
        let mut g_max = top.cached_gain;
        let mut pool = vec![top];
        while let Some(cached) = queue.max_cached() {
            if cached < g_max - 2.0 * TIE_RTOL * g_max.abs() {
                break;
            }
            let mut c = queue.pop().unwrap();
            refresh(state, &mut c, it, &mut evals)?;
            g_max = g_max.max(c.cached_gain);
            pool.push(c);
        }
        let floor = tie_floor(g_max);
        let best = (0..pool.len())
            .filter(|&i| pool[i].cached_gain >= floor)
            .min_by_key(|&i| pool[i].key())
            .unwrap();
        let chosen = pool.swap_remove(best);
        for c in pool {
            queue.push(c);
        }

        report.eval_counts.push(evals);
        accept(state, &chosen, opts, report)?;
        report.wall_times.push(start.elapsed().as_secs_f64());
    }
    Ok(())
}

/// Suboptimality ratio `(f* − f(S)) / (f* − f(∅))` with `f` the total trace
/// decrease, so `f(∅) = 0`. `f_star` is the optimal decrease over all
/// k-subsets. Greedy guarantees a ratio of at most `(1 − 1/k)^k ≤ 1/e`.
pub fn greedy_bound_certificate(report: &SelectionReport, f_star: f64) -> Result<f64> {
    let f_greedy = report.objective();
    if f_star < f_greedy - 1e-9 {
        return Err(Error::OracleInconsistent {
            f_star,
            greedy: f_greedy,
        });
    }
    if f_star <= 0.0 {
        return Ok(0.0);
    }
    Ok(((f_star - f_greedy) / f_star).max(0.0))
}

/// `(1 − 1/k)^k`, the worst-case greedy ratio for a budget of `k`.
pub fn greedy_ratio_bound(k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let kf = k as f64;
    (1.0 - 1.0 / kf).powi(k as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn path(n: usize) -> Graph {
        Graph::new(n, (0..n - 1).map(|i| (i, i + 1, 1.0))).unwrap()
    }

    fn star(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|i| (0, i, 1.0))).unwrap()
    }

    #[test]
    fn star3_single_candidate() {
        let cands = vec![CandidateEdge::new(1, 2, 1.0)];
        for alg in [Algorithm::Naive, Algorithm::Lazy] {
            let r = run(&star(3), &cands, 1, alg, &GreedyOptions::default()).unwrap();
            assert_eq!(r.selected, vec![Edge::new(1, 2, 1.0)]);
            assert_relative_eq!(r.trace_before, 4.0 / 3.0, epsilon = 1e-13);
            assert_relative_eq!(r.trace_after, 2.0 / 3.0, epsilon = 1e-13);
            assert_eq!(r.eval_counts, vec![1]);
        }
    }

    #[test]
    fn k_zero_is_empty() {
        let g = path(4);
        let cands = g.candidate_edges(|_, _| 1.0);
        let r = naive_greedy(&g, &cands, 0).unwrap();
        assert!(r.selected.is_empty());
        assert_eq!(r.trace_before, r.trace_after);
        let r = lazy_greedy(&g, &cands, 0).unwrap();
        assert!(r.selected.is_empty() && r.eval_counts.is_empty());
    }

    #[test]
    fn path4_picks_long_chord() {
        let g = path(4);
        let cands = g.candidate_edges(|_, _| 1.0);
        assert_eq!(cands.len(), 3);
        let naive = naive_greedy(&g, &cands, 1).unwrap();
        let lazy = lazy_greedy(&g, &cands, 1).unwrap();
        assert_eq!(naive.selected[0].key(), (0, 3));
        assert_eq!(lazy.selected, naive.selected);
        assert_relative_eq!(naive.gains[0], 1.25, epsilon = 1e-13);
    }

    #[test]
    fn k_capped_by_candidates() {
        let g = path(4);
        let cands = g.candidate_edges(|_, _| 1.0);
        let r = lazy_greedy(&g, &cands, 10).unwrap();
        assert_eq!(r.selected.len(), 3);
        assert_relative_eq!(r.trace_after, 0.75, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let disconnected = Graph::new(3, [(0, 1, 1.0)]).unwrap();
        assert!(matches!(
            naive_greedy(&disconnected, &[CandidateEdge::new(1, 2, 1.0)], 1),
            Err(Error::Disconnected)
        ));
        let g = path(3);
        assert!(matches!(
            lazy_greedy(&g, &[CandidateEdge::new(0, 1, 1.0)], 1),
            Err(Error::DuplicateEdge(0, 1))
        ));
        let twice = [CandidateEdge::new(0, 2, 1.0), CandidateEdge::new(2, 0, 1.0)];
        assert!(matches!(lazy_greedy(&g, &twice, 1), Err(Error::DuplicateEdge(0, 2))));
    }

    #[test]
    fn ties_break_lexicographically() {
        // Every chord of C6 between opposite nodes is equivalent.
        let c6 = Graph::new(6, (0..6).map(|i| (i, (i + 1) % 6, 1.0))).unwrap();
        let cands: Vec<_> = [(2, 5), (1, 4), (0, 3)]
            .iter()
            .map(|&(u, v)| CandidateEdge::new(u, v, 1.0))
            .collect();
        for alg in [Algorithm::Naive, Algorithm::Lazy] {
            let r = run(&c6, &cands, 1, alg, &GreedyOptions::default()).unwrap();
            assert_eq!(r.selected[0].key(), (0, 3));
        }
    }

    #[test]
    fn queue_order() {
        let mut q = LazyQueue::new();
        for (u, v, g) in [(0, 2, 1.0), (0, 1, 1.0), (1, 2, 2.0)] {
            let mut c = CandidateEdge::new(u, v, 1.0);
            c.cached_gain = g;
            q.push(c);
        }
        assert_eq!(q.pop().unwrap().key(), (1, 2));
        assert_eq!(q.pop().unwrap().key(), (0, 1));
        assert_eq!(q.pop().unwrap().key(), (0, 2));
        assert!(q.is_empty());
    }

    #[test]
    fn certificate() {
        let g = star(3);
        let r = naive_greedy(&g, &[CandidateEdge::new(1, 2, 1.0)], 1).unwrap();
        assert_eq!(greedy_bound_certificate(&r, r.objective()).unwrap(), 0.0);
        assert!(matches!(
            greedy_bound_certificate(&r, r.objective() - 1e-6),
            Err(Error::OracleInconsistent { .. })
        ));
        assert_relative_eq!(greedy_ratio_bound(3), 8.0 / 27.0);
        assert!(greedy_ratio_bound(50) < 1.0 / std::f64::consts::E);
    }

    #[test]
    fn parallel_sweep_matches_serial() {
        let g = path(9);
        let cands = g.candidate_edges(|u, v| 1.0 + ((u * 7 + v * 3) % 5) as f64);
        let serial = naive_greedy(&g, &cands, 6).unwrap();
        let opts = GreedyOptions {
            parallel: true,
            ..GreedyOptions::default()
        };
        let par = run(&g, &cands, 6, Algorithm::Naive, &opts).unwrap();
        assert_eq!(serial.selected, par.selected);
        assert_eq!(serial.gains, par.gains);
    }
}
