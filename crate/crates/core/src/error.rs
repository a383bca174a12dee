use thiserror::Error;

/// Everything that can go wrong in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("node index {index} out of range for graph with {n} nodes")]
    NodeOutOfRange { index: usize, n: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("invalid weight {w} on edge ({u}, {v})")]
    InvalidWeight { u: usize, v: usize, w: f64 },
    #[error("matrix is not symmetric (asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("matrix has a negative eigenvalue {0:e}")]
    NegativeEigenvalue(f64),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("endpoints ({0}, {1}) lie in different components")]
    DifferentComponents(usize, usize),
    #[error("endpoints ({0}, {1}) lie in the same component")]
    SameComponent(usize, usize),
    #[error("pseudoinverse state is corrupted: beta = {0}")]
    CorruptState(f64),
    #[error("inconsistent oracle value: optimum {f_star} below greedy value {greedy}")]
    OracleInconsistent { f_star: f64, greedy: f64 },
    #[error("combinatorial budget exceeded: {count} instances > {budget}")]
    BudgetExceeded { count: u128, budget: u128 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("connected graph not found after {0} attempts")]
    RetriesExhausted(usize),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
