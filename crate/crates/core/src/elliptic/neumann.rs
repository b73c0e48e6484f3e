use crate::banded::{BandLu, TripletBuilder};
use crate::error::{NsfError, Result};
use crate::field::{BoundaryField, ScalarField};
use crate::grid::Grid;
use crate::stencil::{ScalarBc, Stencils};

use super::push_row;

/// `Δu = f` in Ω, `∂u/∂n = d` on Γ, mean of `u` equal to `mean`.
#[derive(Debug, Clone)]
pub struct NeumannProblem {
    pub rhs: ScalarField,
    pub flux: BoundaryField,
    pub mean: f64,
}

#[derive(Debug, Clone)]
pub struct NeumannSolution {
    pub u: ScalarField,
    /// Constant subtracted from `f` to make the discrete data compatible.
    pub projection: f64,
}

/// Factorized ghost-point Neumann Laplacian with one pinned row.
#[derive(Debug, Clone)]
pub struct NeumannSolver {
    grid: Grid,
    lu: BandLu,
    weights: Vec<f64>,
}

const PINNED: usize = 0;

impl NeumannSolver {
    pub fn new(grid: &Grid) -> Result<Self> {
        let st = Stencils::new(grid);
        let bc = ScalarBc::homogeneous_neumann(grid);
        let n = grid.n_nodes();
        let mut t = TripletBuilder::new(n);
        for node in 0..n {
            if node == PINNED {
                t.add(node, node, 1.0);
            } else {
                push_row(&mut t, node, &st.laplacian(&bc, node), 1.0, |m| m);
            }
        }
        let lu = t.into_band().factor()?;
        let weights = (0..n).map(|k| grid.volume_weight(k)).collect();
        Ok(Self { grid: grid.clone(), lu, weights })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Solves with compatibility projection when `project` is set; otherwise
    /// incompatible data are reported as an error.
    pub fn solve(&self, p: &NeumannProblem, project: bool) -> Result<NeumannSolution> {
        let grid = &self.grid;
        let st = Stencils::new(grid);
        let bc = ScalarBc::neumann(grid, &p.flux);
        let mut b: Vec<f64> = (0..grid.n_nodes())
            .map(|n| p.rhs[n] - st.laplacian(&bc, n).constant)
            .collect();
        let total_w: f64 = self.weights.iter().sum();
        let defect: f64 = b.iter().zip(&self.weights).map(|(v, w)| v * w).sum::<f64>() / total_w;
        let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        if !project && defect.abs() > 1e-10 * scale {
            return Err(NsfError::IncompatibleNeumann { defect });
        }
        for v in &mut b {
            *v -= defect;
        }
        b[PINNED] = 0.0;
        let mut u = ScalarField::from_values(self.lu.solve(&b));
        let shift = p.mean - u.mean(grid);
        for v in u.values_mut() {
            *v += shift;
        }
        Ok(NeumannSolution { u, projection: defect })
    }
}

pub fn solve_neumann(p: &NeumannProblem, grid: &Grid) -> Result<NeumannSolution> {
    NeumannSolver::new(grid)?.solve(p, true)
}
