//! Network topology design for optimal coherence.
//!
//! Network coherence of a weighted undirected graph is half the trace of
//! the pseudoinverse of its Laplacian. This crate selects edges to add to a
//! connected graph so that the trace drops as far as possible (greedy and
//! lazy greedy driven by rank-one pseudoinverse updates), grows small-trace
//! spanning trees from scratch, and ships brute-force and Monte Carlo
//! oracles for checking all of it.

pub mod coherence;
pub mod error;
pub mod experiment;
pub mod generate;
pub mod graph;
pub mod greedy;
pub mod io;
pub mod oracle;
pub mod pinv;
pub mod tree;

pub use coherence::{coherence, coherence_spectral, CoherenceValue};
pub use error::{Error, Result};
pub use graph::{CandidateEdge, Edge, Graph, IncidenceRow};
pub use greedy::{lazy_greedy, naive_greedy, Algorithm, SelectionReport};
pub use pinv::PinvState;
