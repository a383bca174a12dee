//! Network coherence, `𝒞 = ½·trace(L†)`.

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::pinv::PinvState;

/// Coherence of a graph together with the pseudoinverse trace it came from.
/// Disconnected graphs carry `+∞` in both fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceValue {
    pub value: f64,
    pub trace_pinv: f64,
}

impl CoherenceValue {
    pub fn from_trace(trace_pinv: f64) -> Self {
        CoherenceValue {
            value: 0.5 * trace_pinv,
            trace_pinv,
        }
    }

    pub fn disconnected() -> Self {
        CoherenceValue {
            value: f64::INFINITY,
            trace_pinv: f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

/// Coherence from the pseudoinverse trace.
pub fn coherence(g: &Graph) -> CoherenceValue {
    if !g.is_connected() {
        return CoherenceValue::disconnected();
    }
    match PinvState::from_graph(g) {
        Ok(state) => CoherenceValue::from_trace(state.trace()),
        // A valid Laplacian is always symmetric PSD.
        Err(e) => unreachable!("Laplacian pseudoinverse failed: {e}"),
    }
}

/// Coherence as `½ Σ_{i≥2} 1/λ_i` over the sorted Laplacian spectrum.
pub fn coherence_spectral(g: &Graph) -> Result<CoherenceValue> {
    let n = g.n();
    if n < 2 {
        return Ok(CoherenceValue::from_trace(0.0));
    }
    let mut eigenvalues: Vec<f64> = SymmetricEigen::new(g.laplacian()).eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(f64::total_cmp);
    let lambda_max = eigenvalues[n - 1].abs();
    let tau = n as f64 * f64::EPSILON * lambda_max;
    if eigenvalues[1] <= tau {
        return Err(Error::Disconnected);
    }
    let trace: f64 = eigenvalues[1..].iter().map(|l| 1.0 / l).sum();
    Ok(CoherenceValue::from_trace(trace))
}
