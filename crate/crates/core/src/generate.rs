//! Seeded graph generators: Erdős–Rényi, cycle, Barabási–Albert, complete.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};

/// Default multiplier on `ln(n)/n` for Erdős–Rényi edge probability.
pub const DEFAULT_ER_SCALE: f64 = 1.1;

/// Resampling budget for connected Erdős–Rényi graphs.
pub const ER_MAX_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GeneratorSpec {
    /// Edge probability `p = c·ln(n)/n`, clamped to `(0, 1]`.
    Er { n: usize, c: f64 },
    Cycle { n: usize },
    /// Preferential attachment with `m` edges per arriving node.
    Ba { n: usize, m: usize },
    Complete { n: usize },
}

impl GeneratorSpec {
    pub fn n(&self) -> usize {
        match *self {
            GeneratorSpec::Er { n, .. }
            | GeneratorSpec::Cycle { n }
            | GeneratorSpec::Ba { n, .. }
            | GeneratorSpec::Complete { n } => n,
        }
    }

    pub fn is_stochastic(&self) -> bool {
        matches!(self, GeneratorSpec::Er { .. } | GeneratorSpec::Ba { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub graph: Graph,
    /// Samples drawn before a connected one was found (1 for deterministic kinds).
    pub attempts: usize,
}

pub fn er_probability(n: usize, c: f64) -> f64 {
    if n < 2 {
        return 1.0;
    }
    let nf = n as f64;
    (c * nf.ln() / nf).clamp(f64::MIN_POSITIVE, 1.0)
}

pub fn generate(spec: &GeneratorSpec, seed: u64) -> Result<Generated> {
    match *spec {
        GeneratorSpec::Er { n, c } => erdos_renyi(n, c, seed, ER_MAX_ATTEMPTS),
        GeneratorSpec::Cycle { n } => Ok(Generated {
            graph: cycle(n)?,
            attempts: 1,
        }),
        GeneratorSpec::Ba { n, m } => Ok(Generated {
            graph: barabasi_albert(n, m, seed)?,
            attempts: 1,
        }),
        GeneratorSpec::Complete { n } => Ok(Generated {
            graph: complete(n),
            attempts: 1,
        }),
    }
}

/// Connected G(n, p) sample, resampling up to `max_attempts` times.
pub fn erdos_renyi(n: usize, c: f64, seed: u64, max_attempts: usize) -> Result<Generated> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("er needs n >= 2, got {n}")));
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidParameter(format!("er scale c must be positive, got {c}")));
    }
    let p = er_probability(n, c);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=max_attempts {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random::<f64>() < p {
                    edges.push(Edge::new(u, v, 1.0));
                }
            }
        }
        let g = Graph::new(n, edges)?;
        if g.is_connected() {
            return Ok(Generated { graph: g, attempts: attempt });
        }
    }
    Err(Error::RetriesExhausted(max_attempts))
}

pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("cycle needs n >= 3, got {n}")));
    }
    Graph::new(n, (0..n).map(|i| (i, (i + 1) % n, 1.0)))
}

pub fn complete(n: usize) -> Graph {
    let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for u in 0..n {
        for v in u + 1..n {
            edges.push(Edge::new(u, v, 1.0));
        }
    }
    Graph::new(n, edges).expect("complete graph is valid")
}

/// Barabási–Albert graph. Starts from a star on `m + 1` nodes; each later
/// node links to `m` distinct existing nodes drawn with probability
/// proportional to degree. `m = 1` yields a tree.
pub fn barabasi_albert(n: usize, m: usize, seed: u64) -> Result<Graph> {
    if m < 1 || n <= m {
        return Err(Error::InvalidParameter(format!("ba needs 1 <= m < n, got n = {n}, m = {m}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<Edge> = (1..=m).map(|i| Edge::new(0, i, 1.0)).collect();
    // Each node appears once per incident edge.
    let mut endpoints: Vec<usize> = edges.iter().flat_map(|e| [e.u, e.v]).collect();
    for node in m + 1..n {
        let mut targets: Vec<usize> = Vec::with_capacity(m);
        while targets.len() < m {
            let t = endpoints[rng.random_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        targets.sort_unstable();
        for t in targets {
            edges.push(Edge::new(t, node, 1.0));
            endpoints.push(t);
            endpoints.push(node);
        }
    }
    Graph::new(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherence::coherence;
    use approx::assert_relative_eq;

    #[test]
    fn cycle4() {
        let g = cycle(4).unwrap();
        let keys: Vec<_> = g.edges().iter().map(Edge::key).collect();
        assert_eq!(keys, vec![(0, 1), (0, 3), (1, 2), (2, 3)]);
        assert_relative_eq!(coherence(&g).trace_pinv, 1.25, epsilon = 1e-12);
        assert!(cycle(2).is_err());
    }

    #[test]
    fn ba_tree() {
        for seed in 0..5 {
            let g = barabasi_albert(5, 1, seed).unwrap();
            assert_eq!(g.num_edges(), 4);
            assert!(g.is_connected());
        }
        let g = barabasi_albert(30, 2, 9).unwrap();
        assert_eq!(g.num_edges(), 2 + 2 * 27);
        assert!(barabasi_albert(3, 3, 0).is_err());
        assert!(barabasi_albert(3, 0, 0).is_err());
    }

    #[test]
    fn er_connected_and_seeded() {
        let a = erdos_renyi(30, 1.1, 5, ER_MAX_ATTEMPTS).unwrap();
        assert!(a.graph.is_connected());
        assert!(a.attempts >= 1);
        let b = erdos_renyi(30, 1.1, 5, ER_MAX_ATTEMPTS).unwrap();
        assert_eq!(a, b);
        assert!(matches!(erdos_renyi(40, 0.01, 1, 3), Err(Error::RetriesExhausted(3))));
    }

    #[test]
    fn probability_clamped() {
        assert_relative_eq!(er_probability(30, 1.1), 1.1 * 30f64.ln() / 30.0);
        assert_eq!(er_probability(3, 10.0), 1.0);
    }

    #[test]
    fn complete_graph() {
        let g = complete(5);
        assert_eq!(g.num_edges(), 10);
        assert_relative_eq!(coherence(&g).trace_pinv, 0.8, epsilon = 1e-12);
    }
}
