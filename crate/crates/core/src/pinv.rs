//! Maintained Laplacian pseudoinverse.
//!
//! [`PinvState`] holds `L†` for the current graph together with its trace,
//! rank and component partition. Adding an edge inside a component keeps the
//! rank and is handled by a rank-one update, `L† − (1/β)(L†m)(L†m)ᵀ` with
//! `β = 1 + mᵀL†m`. Adding an edge across components raises the rank by one;
//! its trace increase is `(1 + mᵀL†m) / ‖(I − LL†)m‖²` and the state is
//! rebuilt from the updated Laplacian.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::{Components, Graph, IncidenceRow};

/// Entrywise asymmetry above which input is rejected.
const SYMMETRY_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct PinvState {
    laplacian: DMatrix<f64>,
    pinv: DMatrix<f64>,
    trace: f64,
    rank: usize,
    components: Components,
}

impl PinvState {
    /// Pseudoinverse of a Laplacian via its symmetric eigendecomposition.
    ///
    /// Eigenvalues at or below `τ = n·ε·λ_max` are treated as zero, and so
    /// are the `components.count()` smallest ones, which are structural.
    pub fn from_laplacian(laplacian: DMatrix<f64>, components: Components) -> Result<Self> {
        let n = laplacian.nrows();
        assert_eq!(n, laplacian.ncols(), "Laplacian must be square");
        assert_eq!(n, components.len(), "partition size must match matrix");

        let mut asym = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                asym = asym.max((laplacian[(i, j)] - laplacian[(j, i)]).abs());
            }
        }
        if asym > SYMMETRY_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        if n == 0 {
            return Ok(PinvState {
                laplacian,
                pinv: DMatrix::zeros(0, 0),
                trace: 0.0,
                rank: 0,
                components,
            });
        }

        let eig = SymmetricEigen::new(laplacian.clone());
        let lambda_max = eig.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let tau = n as f64 * f64::EPSILON * lambda_max;
        if let Some(&neg) = eig.eigenvalues.iter().find(|&&x| x < -tau) {
            return Err(Error::NegativeEigenvalue(neg));
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let structural = components.count();

        let mut pinv = DMatrix::zeros(n, n);
        let mut rank = 0;
        for (pos, &k) in order.iter().enumerate() {
            let lambda = eig.eigenvalues[k];
            if pos < structural || lambda <= tau {
                continue;
            }
            rank += 1;
            let q = eig.eigenvectors.column(k);
            pinv.ger(1.0 / lambda, &q, &q, 1.0);
        }
        symmetrize(&mut pinv);
        let trace = pinv.trace();
        Ok(PinvState {
            laplacian,
            pinv,
            trace,
            rank,
            components,
        })
    }

    pub fn from_graph(g: &Graph) -> Result<Self> {
        Self::from_laplacian(g.laplacian(), g.components())
    }

    pub fn n(&self) -> usize {
        self.pinv.nrows()
    }

    pub fn pinv(&self) -> &DMatrix<f64> {
        &self.pinv
    }

    pub fn laplacian(&self) -> &DMatrix<f64> {
        &self.laplacian
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn components(&self) -> &Components {
        &self.components
    }

    pub fn is_connected(&self) -> bool {
        self.components.count() <= 1
    }

    /// `mᵀL†m = s²(L†uu + L†vv − 2L†uv)`, the effective resistance of the
    /// pair scaled by the edge weight.
    pub fn quadratic_form(&self, row: &IncidenceRow) -> f64 {
        let p = &self.pinv;
        row.weight() * (p[(row.u, row.u)] + p[(row.v, row.v)] - 2.0 * p[(row.u, row.v)])
    }

    /// `‖L†m‖² = s²‖col_u − col_v‖²`.
    fn image_norm_sq(&self, row: &IncidenceRow) -> f64 {
        let cu = self.pinv.column(row.u);
        let cv = self.pinv.column(row.v);
        let sum: f64 = cu.iter().zip(cv.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
        row.weight() * sum
    }

    fn require_same(&self, row: &IncidenceRow) -> Result<()> {
        if self.components.same(row.u, row.v) {
            Ok(())
        } else {
            Err(Error::DifferentComponents(row.u, row.v))
        }
    }

    fn require_different(&self, row: &IncidenceRow) -> Result<()> {
        if self.components.same(row.u, row.v) {
            Err(Error::SameComponent(row.u, row.v))
        } else if row.s <= 0.0 {
            Err(Error::InvalidWeight {
                u: row.u,
                v: row.v,
                w: row.weight(),
            })
        } else {
            Ok(())
        }
    }

    fn beta(&self, row: &IncidenceRow) -> Result<f64> {
        let beta = 1.0 + self.quadratic_form(row);
        if beta > 0.0 && beta.is_finite() {
            Ok(beta)
        } else {
            Err(Error::CorruptState(beta))
        }
    }

    /// Trace decrease from adding `row` inside a component, in O(n).
    pub fn marginal_trace_decrease(&self, row: &IncidenceRow) -> Result<f64> {
        if row.s == 0.0 {
            return Ok(0.0);
        }
        self.require_same(row)?;
        let beta = self.beta(row)?;
        Ok(self.image_norm_sq(row) / beta)
    }

    /// Rank-preserving update, returning a new state.
    pub fn rank_one_update(&self, row: &IncidenceRow) -> Result<PinvState> {
        let mut next = self.clone();
        next.apply_rank_one(row)?;
        Ok(next)
    }

    /// In-place form of [`rank_one_update`](Self::rank_one_update), O(n²).
    pub fn apply_rank_one(&mut self, row: &IncidenceRow) -> Result<f64> {
        if row.s == 0.0 {
            return Ok(0.0);
        }
        self.require_same(row)?;
        let beta = self.beta(row)?;
        let k: DVector<f64> = (self.pinv.column(row.u) - self.pinv.column(row.v)) * row.s;
        let decrease = k.norm_squared() / beta;
        self.pinv.ger(-1.0 / beta, &k, &k, 1.0);
        self.trace -= decrease;
        add_edge_to_laplacian(&mut self.laplacian, row);
        Ok(decrease)
    }

    /// `(I − LL†)m`: the projection of `m` onto the Laplacian null space,
    /// i.e. each entry replaced by the mean of `m` over its component.
    pub fn project_onto_nullspace(&self, row: &IncidenceRow) -> DVector<f64> {
        let n = self.n();
        let mut out = DVector::zeros(n);
        let (ru, rv) = (self.components.find(row.u), self.components.find(row.v));
        if ru == rv || row.s == 0.0 {
            return out;
        }
        let mean_u = row.s / self.components.component_size(row.u) as f64;
        let mean_v = -row.s / self.components.component_size(row.v) as f64;
        for i in 0..n {
            let r = self.components.find(i);
            if r == ru {
                out[i] = mean_u;
            } else if r == rv {
                out[i] = mean_v;
            }
        }
        out
    }

    /// `‖(I − LL†)m‖² = s²(1/|C_u| + 1/|C_v|)` for endpoints in different
    /// components, zero otherwise.
    pub fn nullspace_norm_sq(&self, row: &IncidenceRow) -> f64 {
        if self.components.same(row.u, row.v) {
            return 0.0;
        }
        let cu = self.components.component_size(row.u) as f64;
        let cv = self.components.component_size(row.v) as f64;
        row.weight() * (1.0 / cu + 1.0 / cv)
    }

    /// Trace increase from adding a rank-increasing edge.
    pub fn attach_gain(&self, row: &IncidenceRow) -> Result<f64> {
        self.require_different(row)?;
        Ok((1.0 + self.quadratic_form(row)) / self.nullspace_norm_sq(row))
    }

    /// Adds a rank-increasing edge and rebuilds the pseudoinverse.
    pub fn attach_update(&self, row: &IncidenceRow) -> Result<PinvState> {
        self.require_different(row)?;
        let mut laplacian = self.laplacian.clone();
        add_edge_to_laplacian(&mut laplacian, row);
        let mut components = self.components.clone();
        components.union(row.u, row.v);
        PinvState::from_laplacian(laplacian, components)
    }

    /// Recomputes `L†` from the maintained Laplacian, discarding any
    /// accumulated rounding from rank-one updates.
    pub fn refactorize(&mut self) -> Result<()> {
        *self = PinvState::from_laplacian(self.laplacian.clone(), self.components.clone())?;
        Ok(())
    }
}

fn add_edge_to_laplacian(l: &mut DMatrix<f64>, row: &IncidenceRow) {
    let w = row.weight();
    l[(row.u, row.u)] += w;
    l[(row.v, row.v)] += w;
    l[(row.u, row.v)] -= w;
    l[(row.v, row.u)] -= w;
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in i + 1..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}
