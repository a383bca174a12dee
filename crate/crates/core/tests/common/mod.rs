#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use netcoh::{CandidateEdge, Edge, Graph};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random connected graph: a random recursive tree plus extra edges with
/// probability `p`. Weights uniform in [0.5, 2] or all 1.
pub fn random_connected(rng: &mut ChaCha8Rng, n: usize, p: f64, unit: bool) -> Graph {
    let mut edges = Vec::new();
    let weight = |rng: &mut ChaCha8Rng| if unit { 1.0 } else { rng.random_range(0.5..2.0) };
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(rng);
    for i in 1..n {
        let j = rng.random_range(0..i);
        let w = weight(rng);
        edges.push(Edge::new(labels[i], labels[j], w));
    }
    let mut g = Graph::new(n, edges).unwrap();
    for u in 0..n {
        for v in u + 1..n {
            if !g.contains_edge(u, v) && rng.random::<f64>() < p {
                let w = weight(rng);
                g.insert_edge((u, v, w)).unwrap();
            }
        }
    }
    g
}

/// Random forest with at least two components.
pub fn random_disconnected(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    assert!(n >= 2);
    let cut = rng.random_range(1..n);
    let mut edges = Vec::new();
    for i in 1..n {
        if i == cut {
            continue;
        }
        let lo = if i < cut { 0 } else { cut };
        let j = rng.random_range(lo..i);
        edges.push(Edge::new(i, j, rng.random_range(0.5..2.0)));
    }
    Graph::new(n, edges).unwrap()
}

pub fn random_candidate(rng: &mut ChaCha8Rng, g: &Graph, unit: bool) -> Option<CandidateEdge> {
    let cands = g.candidate_edges(|_, _| 1.0);
    cands.choose(rng).map(|c| {
        let w = if unit { 1.0 } else { rng.random_range(0.5..2.0) };
        CandidateEdge::new(c.u, c.v, w)
    })
}

/// Dense reference pseudoinverse, independent of the crate's cutoff logic:
/// eigenvalues below 1e-9·λ_max are dropped.
pub fn dense_pinv(l: &DMatrix<f64>) -> DMatrix<f64> {
    let n = l.nrows();
    let eig = SymmetricEigen::new(l.clone());
    let lmax = eig.eigenvalues.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let mut p = DMatrix::zeros(n, n);
    for k in 0..n {
        let lam = eig.eigenvalues[k];
        if lam > 1e-9 * lmax {
            let q = eig.eigenvectors.column(k);
            p += (q * q.transpose()) / lam;
        }
    }
    p
}

pub fn rel_frobenius(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

pub fn star(n: usize) -> Graph {
    Graph::new(n, (1..n).map(|i| (0, i, 1.0))).unwrap()
}

pub fn path(n: usize) -> Graph {
    Graph::new(n, (0..n - 1).map(|i| (i, i + 1, 1.0))).unwrap()
}

pub fn complete(n: usize) -> Graph {
    netcoh::generate::complete(n)
}
