//! Growing spanning trees with small `trace(L†)`.
//!
//! Starting from the heaviest edge, each step joins one uncovered node to
//! the covered set through the edge whose rank-increasing trace increase
//! `(1 + mᵀL†m) / ‖(I − LL†)m‖²` is smallest. Only edges with exactly one
//! covered endpoint are feasible, so no cycle can form.

use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, IncidenceRow};
use crate::greedy::{Algorithm, SelectionReport, TIE_RTOL};
use crate::oracle;
use crate::pinv::PinvState;

/// Covered nodes, chosen edges and the pseudoinverse of the forest so far.
#[derive(Debug, Clone)]
pub struct TreeBuildState {
    covered: Vec<bool>,
    chosen: Vec<Edge>,
    pinv: PinvState,
}

impl TreeBuildState {
    /// State over `g` (which must be connected) plus `extra` isolated nodes;
    /// the nodes of `g` start out covered.
    pub fn from_graph(g: &Graph, extra: usize) -> Result<Self> {
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        let full = g.with_extra_nodes(extra);
        let mut covered = vec![false; full.n()];
        for c in covered.iter_mut().take(g.n()) {
            *c = true;
        }
        Ok(TreeBuildState {
            covered,
            chosen: Vec::new(),
            pinv: PinvState::from_graph(&full)?,
        })
    }

    /// Empty forest on `n` nodes with nothing covered.
    pub fn empty(n: usize) -> Result<Self> {
        Ok(TreeBuildState {
            covered: vec![false; n],
            chosen: Vec::new(),
            pinv: PinvState::from_graph(&Graph::empty(n))?,
        })
    }

    pub fn covered(&self) -> &[bool] {
        &self.covered
    }

    pub fn chosen(&self) -> &[Edge] {
        &self.chosen
    }

    pub fn pinv(&self) -> &PinvState {
        &self.pinv
    }

    pub fn trace(&self) -> f64 {
        self.pinv.trace()
    }

    pub fn is_complete(&self) -> bool {
        self.covered.iter().all(|&c| c)
    }

    /// Feasible edges (one endpoint covered, positive weight) with their
    /// trace increase, in lexicographic order.
    pub fn frontier_gains(&self, weight_fn: &impl Fn(usize, usize) -> f64) -> Result<Vec<(Edge, f64)>> {
        let n = self.covered.len();
        let mut out = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if self.covered[u] == self.covered[v] {
                    continue;
                }
                let w = checked_weight(weight_fn, u, v)?;
                if w == 0.0 {
                    continue;
                }
                let gain = self.pinv.attach_gain(&IncidenceRow::new(u, v, w)?)?;
                out.push((Edge::new(u, v, w), gain));
            }
        }
        Ok(out)
    }

    /// Adds a rank-increasing edge and returns the realized trace increase.
    pub fn attach(&mut self, e: Edge) -> Result<f64> {
        let before = self.pinv.trace();
        self.pinv = self.pinv.attach_update(&IncidenceRow::from_edge(&e)?)?;
        self.covered[e.u] = true;
        self.covered[e.v] = true;
        self.chosen.push(e);
        Ok(self.pinv.trace() - before)
    }

    /// One greedy step: attaches the frontier edge with the smallest trace
    /// increase. Returns the edge and the number of gains evaluated.
    pub fn step(&mut self, weight_fn: &impl Fn(usize, usize) -> f64) -> Result<(Edge, usize)> {
        let frontier = self.frontier_gains(weight_fn)?;
        let g_min = frontier
            .iter()
            .map(|&(_, g)| g)
            .fold(f64::INFINITY, f64::min);
        let ceiling = g_min + TIE_RTOL * g_min.abs();
        let (edge, _) = frontier
            .iter()
            .filter(|(_, g)| *g <= ceiling)
            .min_by_key(|(e, _)| e.key())
            .copied()
            .ok_or(Error::Disconnected)?;
        self.attach(edge)?;
        Ok((edge, frontier.len()))
    }
}

fn checked_weight(weight_fn: &impl Fn(usize, usize) -> f64, u: usize, v: usize) -> Result<f64> {
    let w = weight_fn(u, v);
    if !(w >= 0.0) || !w.is_finite() {
        return Err(Error::InvalidWeight { u, v, w });
    }
    Ok(w)
}

/// Builds a spanning tree on `n` nodes with pairwise weights `weight_fn`.
///
/// Zero-weight pairs are never used; negative weights are an error. The
/// report's `gains` are the trace increases of each edge in order, starting
/// with the initial heaviest edge.
pub fn build_tree(n: usize, weight_fn: impl Fn(usize, usize) -> f64) -> Result<(Graph, SelectionReport)> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("tree needs n >= 2, got {n}")));
    }
    let start = Instant::now();
    let mut first: Option<Edge> = None;
    for u in 0..n {
        for v in u + 1..n {
            let w = checked_weight(&weight_fn, u, v)?;
            if w > 0.0 && first.map_or(true, |f| w > f.w) {
                first = Some(Edge::new(u, v, w));
            }
        }
    }
    let first = first.ok_or(Error::Disconnected)?;

    let mut state = TreeBuildState::empty(n)?;
    let mut report = SelectionReport {
        algorithm: Algorithm::Tree,
        selected: Vec::new(),
        gains: Vec::new(),
        trace_before: 0.0,
        trace_after: 0.0,
        eval_counts: Vec::new(),
        wall_times: Vec::new(),
        seed: None,
    };
    let gain = state.attach(first)?;
    report.selected.push(first);
    report.gains.push(gain);
    report.eval_counts.push(0);
    report.wall_times.push(start.elapsed().as_secs_f64());

    grow(&mut state, &weight_fn, &mut report)?;
    report.trace_after = state.trace();
    let tree = Graph::new(n, state.chosen().iter().copied())?;
    Ok((tree, report))
}

/// Attaches `new_nodes` fresh nodes (ids `g.n()..g.n()+new_nodes`) to a
/// connected graph, one edge each, by the same smallest-increase rule.
pub fn attach_nodes(
    g: &Graph,
    new_nodes: usize,
    weight_fn: impl Fn(usize, usize) -> f64,
) -> Result<(Graph, SelectionReport)> {
    let mut state = TreeBuildState::from_graph(g, new_nodes)?;
    let trace_before = state.trace();
    let mut report = SelectionReport {
        algorithm: Algorithm::Tree,
        selected: Vec::new(),
        gains: Vec::new(),
        trace_before,
        trace_after: trace_before,
        eval_counts: Vec::new(),
        wall_times: Vec::new(),
        seed: None,
    };
    grow(&mut state, &weight_fn, &mut report)?;
    report.trace_after = state.trace();
    let mut out = g.with_extra_nodes(new_nodes);
    for e in state.chosen() {
        out.insert_edge(*e)?;
    }
    Ok((out, report))
}

fn grow(
    state: &mut TreeBuildState,
    weight_fn: &impl Fn(usize, usize) -> f64,
    report: &mut SelectionReport,
) -> Result<()> {
    while !state.is_complete() {
        let start = Instant::now();
        let before = state.trace();
        let (edge, evals) = state.step(weight_fn)?;
        report.selected.push(edge);
        report.gains.push(state.trace() - before);
        report.eval_counts.push(evals);
        report.wall_times.push(start.elapsed().as_secs_f64());
    }
    Ok(())
}

/// Built, closed-form star, and brute-force optimal traces for unit weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StarCertificate {
    pub n: usize,
    pub built_trace: f64,
    pub star_trace: f64,
    pub bruteforce_trace: f64,
}

pub const STAR_CERT_TOL: f64 = 1e-9;

/// Confirms that the unit-weight tree builder reaches the global optimum
/// `(n−1)²/n` over all labeled trees.
pub fn star_certificate(n: usize) -> Result<StarCertificate> {
    if !(3..=oracle::MAX_TREE_ORACLE_N).contains(&n) {
        return Err(Error::InvalidParameter(format!(
            "star certificate needs 3 <= n <= {}, got {n}",
            oracle::MAX_TREE_ORACLE_N
        )));
    }
    let (_, report) = build_tree(n, |_, _| 1.0)?;
    let nf = n as f64;
    let star_trace = (nf - 1.0).powi(2) / nf;
    let oracle = oracle::best_tree_bruteforce(n, |_, _| 1.0)?;
    let cert = StarCertificate {
        n,
        built_trace: report.trace_after,
        star_trace,
        bruteforce_trace: oracle.best_value,
    };
    for (label, value) in [("built", cert.built_trace), ("brute-force", cert.bruteforce_trace)] {
        if (value - star_trace).abs() > STAR_CERT_TOL * star_trace {
            return Err(Error::InvalidParameter(format!(
                "{label} trace {value} differs from star trace {star_trace}"
            )));
        }
    }
    Ok(cert)
}

/// Hub of a star graph, if `g` is one.
pub fn star_hub(g: &Graph) -> Option<usize> {
    let n = g.n();
    if n < 2 || g.num_edges() != n - 1 {
        return None;
    }
    let mut degree = vec![0usize; n];
    for e in g.edges() {
        degree[e.u] += 1;
        degree[e.v] += 1;
    }
    if n == 2 {
        return Some(0);
    }
    degree.iter().position(|&d| d == n - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherence::coherence;
    use approx::assert_relative_eq;

    #[test]
    fn n3_unit() {
        let (t, r) = build_tree(3, |_, _| 1.0).unwrap();
        assert_eq!(t.num_edges(), 2);
        assert!(t.is_connected());
        assert_relative_eq!(r.trace_after, 4.0 / 3.0, epsilon = 1e-12);
        assert_eq!(t.edges()[0].key(), (0, 1));
    }

    #[test]
    fn n4_and_n6_unit_are_stars() {
        let (t, r) = build_tree(4, |_, _| 1.0).unwrap();
        assert_eq!(star_hub(&t), Some(0));
        assert_relative_eq!(r.trace_after, 2.25, epsilon = 1e-12);
        let (t, r) = build_tree(6, |_, _| 1.0).unwrap();
        assert_eq!(star_hub(&t), Some(0));
        assert_relative_eq!(r.trace_after, 25.0 / 6.0, epsilon = 1e-12);
        assert_relative_eq!(r.gains.iter().sum::<f64>(), r.trace_after, epsilon = 1e-12);
    }

    #[test]
    fn starts_from_heaviest_edge() {
        let (t, r) = build_tree(4, |u, v| if (u, v) == (2, 3) { 5.0 } else { 1.0 }).unwrap();
        assert_eq!(r.selected[0].key(), (2, 3));
        assert!(t.contains_edge(2, 3));
        assert_relative_eq!(r.trace_after, coherence(&t).trace_pinv, max_relative = 1e-10);
    }

    #[test]
    fn build_errors() {
        assert!(matches!(build_tree(1, |_, _| 1.0), Err(Error::InvalidParameter(_))));
        assert!(matches!(build_tree(3, |_, _| -1.0), Err(Error::InvalidWeight { .. })));
        // Node 2 only reachable through zero-weight pairs.
        assert!(matches!(
            build_tree(3, |_, v| if v == 2 { 0.0 } else { 1.0 }),
            Err(Error::Disconnected)
        ));
    }

    #[test]
    fn attach_to_single_edge() {
        let g = Graph::new(2, [(0, 1, 1.0)]).unwrap();
        let (out, r) = attach_nodes(&g, 1, |_, _| 1.0).unwrap();
        assert_eq!(r.selected, vec![Edge::new(0, 2, 1.0)]);
        assert_relative_eq!(r.gains[0], 5.0 / 6.0, epsilon = 1e-12);
        assert_relative_eq!(r.trace_before, 0.5, epsilon = 1e-12);
        assert_relative_eq!(r.trace_after, 4.0 / 3.0, epsilon = 1e-12);
        assert_eq!(out.n(), 3);
    }

    #[test]
    fn attach_to_star_picks_hub() {
        for hub in 0..5 {
            let g = Graph::new(5, (0..5).filter(|&i| i != hub).map(|i| (hub, i, 1.0))).unwrap();
            let (out, r) = attach_nodes(&g, 1, |_, _| 1.0).unwrap();
            assert_eq!(r.selected[0].key(), (hub, 5));
            assert_eq!(star_hub(&out), Some(hub));
        }
    }

    #[test]
    fn attach_zero_nodes() {
        let g = Graph::new(3, [(0, 1, 1.0), (1, 2, 2.0)]).unwrap();
        let (out, r) = attach_nodes(&g, 0, |_, _| 1.0).unwrap();
        assert_eq!(out, g);
        assert!(r.selected.is_empty());
        assert!(attach_nodes(&Graph::new(3, [(0, 1, 1.0)]).unwrap(), 1, |_, _| 1.0).is_err());
    }

    #[test]
    fn certificates() {
        for (n, value) in [(3, 4.0 / 3.0), (4, 2.25), (5, 3.2)] {
            let c = star_certificate(n).unwrap();
            assert_relative_eq!(c.built_trace, value, max_relative = 1e-9);
            assert_relative_eq!(c.bruteforce_trace, value, max_relative = 1e-9);
            assert_relative_eq!(c.star_trace, value, max_relative = 1e-12);
        }
        assert!(star_certificate(2).is_err());
        assert!(star_certificate(9).is_err());
    }
}
