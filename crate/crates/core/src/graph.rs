//! Weighted undirected graphs, incidence rows and Laplacian assembly.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One undirected weighted edge, stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

impl Edge {
    pub fn new(u: usize, v: usize, w: f64) -> Self {
        let (u, v) = if u <= v { (u, v) } else { (v, u) };
        Edge { u, v, w }
    }

    pub fn key(&self) -> (usize, usize) {
        (self.u, self.v)
    }
}

impl From<(usize, usize, f64)> for Edge {
    fn from((u, v, w): (usize, usize, f64)) -> Self {
        Edge::new(u, v, w)
    }
}

/// A weighted undirected graph on nodes `0..n`.
///
/// Edges are kept canonical (`u < v`), unique, and sorted lexicographically,
/// so every downstream tie-break is deterministic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
}

impl Graph {
    pub fn new<E: Into<Edge>>(n: usize, edges: impl IntoIterator<Item = E>) -> Result<Self> {
        let mut out = Vec::new();
        for e in edges {
            let e = e.into();
            check_edge(n, &e)?;
            out.push(e);
        }
        out.sort_by(|a, b| a.key().cmp(&b.key()));
        if let Some(pair) = out.windows(2).find(|p| p[0].key() == p[1].key()) {
            return Err(Error::DuplicateEdge(pair[0].u, pair[0].v));
        }
        Ok(Graph { n, edges: out })
    }

    /// Graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Self {
        Graph { n, edges: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_edge(&self, u: usize, v: usize) -> bool {
        let key = if u <= v { (u, v) } else { (v, u) };
        self.edges.binary_search_by(|e| e.key().cmp(&key)).is_ok()
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        let key = if u <= v { (u, v) } else { (v, u) };
        self.edges
            .binary_search_by(|e| e.key().cmp(&key))
            .ok()
            .map(|i| self.edges[i].w)
    }

    /// Inserts an edge in place, keeping the sorted order.
    pub fn insert_edge(&mut self, e: impl Into<Edge>) -> Result<()> {
        let e = e.into();
        check_edge(self.n, &e)?;
        match self.edges.binary_search_by(|x| x.key().cmp(&e.key())) {
            Ok(_) => Err(Error::DuplicateEdge(e.u, e.v)),
            Err(pos) => {
                self.edges.insert(pos, e);
                Ok(())
            }
        }
    }

    /// Returns a new graph with `e` added.
    pub fn add_edge(&self, e: impl Into<Edge>) -> Result<Graph> {
        let mut g = self.clone();
        g.insert_edge(e)?;
        Ok(g)
    }

    /// Returns a copy with `extra` isolated nodes appended.
    pub fn with_extra_nodes(&self, extra: usize) -> Graph {
        Graph {
            n: self.n + extra,
            edges: self.edges.clone(),
        }
    }

    /// Dense weighted Laplacian, `L = Σ_e m_e m_eᵀ`.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = DMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            l[(e.u, e.u)] += e.w;
            l[(e.v, e.v)] += e.w;
            l[(e.u, e.v)] -= e.w;
            l[(e.v, e.u)] -= e.w;
        }
        l
    }

    /// Partition of the nodes by edges of positive weight.
    pub fn components(&self) -> Components {
        let mut c = Components::new(self.n);
        for e in self.edges.iter().filter(|e| e.w > 0.0) {
            c.union(e.u, e.v);
        }
        c
    }

    /// True iff the positive-weight edges connect all nodes. Graphs with
    /// fewer than two nodes count as connected.
    pub fn is_connected(&self) -> bool {
        self.components().count() <= 1
    }

    /// Every absent pair `(u, v)`, `u < v`, weighted by `weight_fn`.
    pub fn candidate_edges(&self, weight_fn: impl Fn(usize, usize) -> f64) -> Vec<CandidateEdge> {
        let mut out = Vec::new();
        let mut present = self.edges.iter().map(Edge::key).peekable();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if present.peek() == Some(&(u, v)) {
                    present.next();
                    continue;
                }
                out.push(CandidateEdge::new(u, v, weight_fn(u, v)));
            }
        }
        out
    }

    /// Same graph with every weight multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Graph> {
        Graph::new(self.n, self.edges.iter().map(|e| Edge::new(e.u, e.v, e.w * c)))
    }
}

fn check_edge(n: usize, e: &Edge) -> Result<()> {
    for idx in [e.u, e.v] {
        if idx >= n {
            return Err(Error::NodeOutOfRange { index: idx, n });
        }
    }
    if e.u == e.v {
        return Err(Error::SelfLoop(e.u));
    }
    if !(e.w >= 0.0) || !e.w.is_finite() {
        return Err(Error::InvalidWeight { u: e.u, v: e.v, w: e.w });
    }
    Ok(())
}

/// Sparse incidence vector of one edge: `+s` at `u`, `-s` at `v`, with
/// `s = sqrt(w)` so that `m mᵀ` is the single-edge weighted Laplacian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidenceRow {
    pub u: usize,
    pub v: usize,
    pub s: f64,
}

impl IncidenceRow {
    pub fn new(u: usize, v: usize, w: f64) -> Result<Self> {
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        if !(w >= 0.0) || !w.is_finite() {
            return Err(Error::InvalidWeight { u, v, w });
        }
        Ok(IncidenceRow { u, v, s: w.sqrt() })
    }

    pub fn from_edge(e: &Edge) -> Result<Self> {
        Self::new(e.u, e.v, e.w)
    }

    pub fn weight(&self) -> f64 {
        self.s * self.s
    }

    pub fn to_dense(&self, n: usize) -> DVector<f64> {
        let mut m = DVector::zeros(n);
        m[self.u] = self.s;
        m[self.v] = -self.s;
        m
    }
}

/// A candidate edge with lazy-greedy bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateEdge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
    pub cached_gain: f64,
    /// Iteration at which `cached_gain` was computed; `None` until first evaluated.
    pub stamp: Option<usize>,
}

impl CandidateEdge {
    pub fn new(u: usize, v: usize, w: f64) -> Self {
        let e = Edge::new(u, v, w);
        CandidateEdge {
            u: e.u,
            v: e.v,
            w,
            cached_gain: f64::INFINITY,
            stamp: None,
        }
    }

    pub fn edge(&self) -> Edge {
        Edge::new(self.u, self.v, self.w)
    }

    pub fn key(&self) -> (usize, usize) {
        (self.u, self.v)
    }
}

impl From<Edge> for CandidateEdge {
    fn from(e: Edge) -> Self {
        CandidateEdge::new(e.u, e.v, e.w)
    }
}

/// Union-find over node ids. `find` takes `&self` (no path compression;
/// union by size keeps trees logarithmic) so a shared state can answer
/// component queries from many readers.
#[derive(Debug, Clone, PartialEq)]
pub struct Components {
    parent: Vec<usize>,
    size: Vec<usize>,
    count: usize,
}

impl Components {
    pub fn new(n: usize) -> Self {
        Components {
            parent: (0..n).collect(),
            size: vec![1; n],
            count: n,
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Number of components.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    pub fn same(&self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    /// Merges the components of `a` and `b`; returns false if already merged.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.count -= 1;
        true
    }

    pub fn component_size(&self, x: usize) -> usize {
        self.size[self.find(x)]
    }

    /// Node lists of every component, ordered by smallest member.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut by_root: Vec<Option<usize>> = vec![None; self.len()];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for x in 0..self.len() {
            let r = self.find(x);
            match by_root[r] {
                Some(i) => out[i].push(x),
                None => {
                    by_root[r] = Some(out.len());
                    out.push(vec![x]);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
    }

    #[test]
    fn new_graph_canonicalizes() {
        let g = Graph::new(2, [(0, 1, 1.0)]).unwrap();
        assert_eq!(g.edges(), &[Edge::new(0, 1, 1.0)]);

        let g = Graph::new(3, [(1, 0, 1.0), (1, 2, 1.0)]).unwrap();
        assert_eq!(g.edges(), &[Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0)]);
        assert_eq!(g.edges()[0].u, 0);
    }

    #[test]
    fn new_graph_errors() {
        assert!(matches!(
            Graph::new(3, [(0, 1, 1.0), (1, 0, 2.0)]),
            Err(Error::DuplicateEdge(0, 1))
        ));
        assert!(matches!(
            Graph::new(3, [(0, 3, 1.0)]),
            Err(Error::NodeOutOfRange { index: 3, n: 3 })
        ));
        assert!(matches!(Graph::new(3, [(0, 1, -1.0)]), Err(Error::InvalidWeight { .. })));
        assert!(matches!(Graph::new(3, [(1, 1, 1.0)]), Err(Error::SelfLoop(1))));
        assert!(Graph::new(3, [(0, 1, f64::NAN)]).is_err());
    }

    #[test]
    fn incidence_rows() {
        let r = IncidenceRow::new(0, 1, 1.0).unwrap();
        assert_eq!(r.s, 1.0);
        assert_eq!(r.to_dense(3).as_slice(), &[1.0, -1.0, 0.0]);

        let r = IncidenceRow::new(0, 1, 4.0).unwrap();
        assert_eq!(r.s, 2.0);
        let m = r.to_dense(2);
        let mm = &m * m.transpose();
        assert_eq!(mm[(0, 0)], 4.0);
        assert_eq!(mm[(1, 1)], 4.0);
        assert_eq!(mm[(0, 1)], -4.0);

        let r = IncidenceRow::new(2, 5, 0.0).unwrap();
        assert_eq!(r.s, 0.0);
        assert!(r.to_dense(6).iter().all(|&x| x == 0.0));

        assert!(matches!(IncidenceRow::new(2, 2, 1.0), Err(Error::SelfLoop(2))));
    }

    #[test]
    fn laplacian_examples() {
        let l = Graph::new(2, [(0, 1, 1.0)]).unwrap().laplacian();
        assert_eq!(l, DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));

        let k3 = Graph::new(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap();
        let l = k3.laplacian();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(l[(i, j)], if i == j { 2.0 } else { -1.0 });
            }
        }

        let l = path3().laplacian();
        assert_eq!(
            l,
            DMatrix::from_row_slice(3, 3, &[1.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 1.0])
        );
    }

    #[test]
    fn connectivity() {
        assert!(Graph::new(2, [(0, 1, 1.0)]).unwrap().is_connected());
        assert!(!Graph::new(3, [(0, 1, 1.0)]).unwrap().is_connected());
        assert!(!Graph::new(3, [(0, 1, 1.0), (1, 2, 0.0)]).unwrap().is_connected());
    }

    #[test]
    fn candidates() {
        let k3 = Graph::new(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap();
        assert!(k3.candidate_edges(|_, _| 1.0).is_empty());

        let c = path3().candidate_edges(|_, _| 2.5);
        assert_eq!(c.len(), 1);
        assert_eq!((c[0].u, c[0].v, c[0].w), (0, 2, 2.5));

        let c = Graph::empty(4).candidate_edges(|_, _| 1.0);
        assert_eq!(c.len(), 6);
        let keys: Vec<_> = c.iter().map(CandidateEdge::key).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn add_edge_keeps_invariants() {
        let g = path3().add_edge((2, 0, 1.0)).unwrap();
        assert_eq!(g.edges()[1].key(), (0, 2));
        assert!(matches!(path3().add_edge((1, 0, 1.0)), Err(Error::DuplicateEdge(0, 1))));
        let g = Graph::empty(4).add_edge((3, 2, 0.5)).unwrap();
        assert_eq!(g.edges(), &[Edge::new(2, 3, 0.5)]);
    }

    #[test]
    fn components_groups() {
        let g = Graph::new(5, [(0, 3, 1.0), (1, 4, 1.0)]).unwrap();
        let c = g.components();
        assert_eq!(c.count(), 3);
        assert_eq!(c.groups(), vec![vec![0, 3], vec![1, 4], vec![2]]);
        assert_eq!(c.component_size(4), 2);
    }
}
