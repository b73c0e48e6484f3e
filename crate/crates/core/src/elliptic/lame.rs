use crate::banded::{BandLu, TripletBuilder};
use crate::error::{NsfError, Result};
use crate::field::{BoundaryField, ScalarField, VectorField};
use crate::grid::Grid;
use crate::stencil::{slip_bcs, Affine, ScalarBc, Stencils};

use super::push_row;

/// Coefficients of `a ∂₁u − div S(∇u)` with friction `α` per face.
#[derive(Debug, Clone, PartialEq)]
pub struct LameParams {
    pub mu: f64,
    pub lambda: f64,
    /// Coefficient `a` of the convective term (0 for the pure Lamé system).
    pub convection: f64,
    pub alpha: Vec<f64>,
}

impl LameParams {
    pub fn uniform(grid: &Grid, mu: f64, lambda: f64, convection: f64, alpha: f64) -> Self {
        Self { mu, lambda, convection, alpha: vec![alpha; grid.n_faces()] }
    }
}

/// Body force and slip data `B` (one boundary field per velocity component;
/// entries on faces normal to that component are ignored).
#[derive(Debug, Clone)]
pub struct LameProblem {
    pub force: VectorField,
    pub slip: Vec<BoundaryField>,
}

impl LameProblem {
    pub fn zeros(grid: &Grid) -> Self {
        Self { force: VectorField::zeros(grid), slip: vec![BoundaryField::zeros(grid); grid.dim()] }
    }
}

/// Factorized slip Lamé operator; unknowns interleaved as `node * d + c`.
#[derive(Debug, Clone)]
pub struct LameSolver {
    grid: Grid,
    params: LameParams,
    lu: BandLu,
}

impl LameSolver {
    pub fn new(grid: &Grid, params: LameParams) -> Result<Self> {
        if !(params.mu > 0.0) || params.lambda < 0.0 {
            return Err(NsfError::InvalidParameter("Lamé system needs mu > 0 and lambda >= 0".into()));
        }
        if params.alpha.len() != grid.n_faces() || params.alpha.iter().any(|a| *a < 0.0) {
            return Err(NsfError::InvalidParameter("friction must be given per face and be nonnegative".into()));
        }
        let d = grid.dim();
        let zero = vec![BoundaryField::zeros(grid); d];
        let bcs = slip_bcs(grid, params.mu, &params.alpha, &zero);
        let mut t = TripletBuilder::new(grid.n_nodes() * d);
        let solver_rows = Rows { grid, params: &params, bcs: &bcs };
        for node in 0..grid.n_nodes() {
            for c in 0..d {
                let row = node * d + c;
                match solver_rows.row(node, c) {
                    None => t.add(row, row, 1.0),
                    Some(parts) => {
                        for (b, st) in parts.iter().enumerate() {
                            push_row(&mut t, row, st, 1.0, |m| m * d + b);
                        }
                    }
                }
            }
        }
        let lu = t.into_band().factor()?;
        Ok(Self { grid: grid.clone(), params, lu })
    }

    pub fn params(&self) -> &LameParams {
        &self.params
    }

    pub fn bcs(&self, slip: &[BoundaryField]) -> Vec<ScalarBc> {
        slip_bcs(&self.grid, self.params.mu, &self.params.alpha, slip)
    }

    pub fn solve(&self, p: &LameProblem) -> VectorField {
        let grid = &self.grid;
        let d = grid.dim();
        let bcs = self.bcs(&p.slip);
        let rows = Rows { grid, params: &self.params, bcs: &bcs };
        let mut b = vec![0.0; grid.n_nodes() * d];
        for node in 0..grid.n_nodes() {
            for c in 0..d {
                if let Some(parts) = rows.row(node, c) {
                    let constant: f64 = parts.iter().map(|st| st.constant).sum();
                    b[node * d + c] = p.force[c][node] - constant;
                }
            }
        }
        let x = self.lu.solve(&b);
        VectorField::from_components(
            (0..d).map(|c| ScalarField::from_values((0..grid.n_nodes()).map(|n| x[n * d + c]).collect())).collect(),
        )
    }

    /// Operator applied to `u` with the slip rule of `slip`. Rows of normal
    /// components on their own faces return the boundary value `u_c`.
    pub fn apply(&self, u: &VectorField, slip: &[BoundaryField]) -> VectorField {
        let grid = &self.grid;
        let bcs = self.bcs(slip);
        let rows = Rows { grid, params: &self.params, bcs: &bcs };
        VectorField::from_components(
            (0..grid.dim())
                .map(|c| {
                    ScalarField::from_fn(grid, |n, _| match rows.row(n, c) {
                        None => u[c][n],
                        Some(parts) => parts.iter().enumerate().map(|(b, st)| st.eval(u[b].values())).sum(),
                    })
                })
                .collect(),
        )
    }
}

struct Rows<'a> {
    grid: &'a Grid,
    params: &'a LameParams,
    bcs: &'a [ScalarBc],
}

impl Rows<'_> {
    /// Row of component `c` at `node`, split per component it touches;
    /// `None` for a Dirichlet (normal-component) row.
    fn row(&self, node: usize, c: usize) -> Option<Vec<Affine>> {
        if self.grid.faces_of(node).any(|f| f.axis == c) {
            return None;
        }
        let st = Stencils::new(self.grid);
        let p = self.params;
        let d = self.grid.dim();
        let grad_div = p.mu / 3.0 + p.lambda;
        let mut parts = vec![Affine::default(); d];
        parts[c].add_scaled(&st.d1(&self.bcs[c], node, 0), p.convection);
        parts[c].add_scaled(&st.laplacian(&self.bcs[c], node), -p.mu);
        for b in 0..d {
            parts[b].add_scaled(&st.d2(&self.bcs[b], node, c, b), -grad_div);
        }
        Some(parts)
    }
}
