use crate::banded::{BandLu, TripletBuilder};
use crate::error::{NsfError, Result};
use crate::field::{BoundaryField, ScalarField};
use crate::grid::Grid;
use crate::stencil::{ScalarBc, Stencils};

use super::push_row;

/// Factorized `r₀ ∂₁η − κΔη` with `∂η/∂n = c − β η` on every face.
#[derive(Debug, Clone)]
pub struct RobinSolver {
    grid: Grid,
    lu: BandLu,
    r0: f64,
    kappa: f64,
    beta: Vec<f64>,
}

impl RobinSolver {
    /// `beta[face]` is the Robin coefficient `L/κ` of each face.
    pub fn new(grid: &Grid, r0: f64, kappa: f64, beta: &[f64]) -> Result<Self> {
        if !(kappa > 0.0) {
            return Err(NsfError::InvalidParameter(format!("kappa must be positive, got {kappa}")));
        }
        if beta.iter().any(|b| *b < 0.0) {
            return Err(NsfError::InvalidParameter("heat exchange coefficients must be nonnegative".into()));
        }
        if beta.iter().all(|b| *b == 0.0) {
            return Err(NsfError::InvalidParameter(
                "Robin problem needs L > 0 on some face; pure Neumann data leave constants undetermined".into(),
            ));
        }
        let bc = Self::bc_with(grid, beta, &BoundaryField::zeros(grid));
        let st = Stencils::new(grid);
        let n = grid.n_nodes();
        let mut t = TripletBuilder::new(n);
        for node in 0..n {
            push_row(&mut t, node, &st.d1(&bc, node, 0), r0, |m| m);
            push_row(&mut t, node, &st.laplacian(&bc, node), -kappa, |m| m);
        }
        let lu = t.into_band().factor()?;
        Ok(Self { grid: grid.clone(), lu, r0, kappa, beta: beta.to_vec() })
    }

    fn bc_with(grid: &Grid, beta: &[f64], flux: &BoundaryField) -> ScalarBc {
        ScalarBc::robin(grid, beta, flux)
    }

    /// Boundary rule for a given inhomogeneous part `c` of the normal derivative.
    pub fn bc(&self, flux: &BoundaryField) -> ScalarBc {
        Self::bc_with(&self.grid, &self.beta, flux)
    }

    pub fn solve(&self, rhs: &ScalarField, flux: &BoundaryField) -> ScalarField {
        let bc = self.bc(flux);
        let st = Stencils::new(&self.grid);
        let b: Vec<f64> = (0..self.grid.n_nodes())
            .map(|n| {
                let c = self.r0 * st.d1(&bc, n, 0).constant - self.kappa * st.laplacian(&bc, n).constant;
                rhs[n] - c
            })
            .collect();
        ScalarField::from_values(self.lu.solve(&b))
    }

    /// `r₀ ∂₁η − κΔη` with the boundary rule of `flux`.
    pub fn apply(&self, eta: &ScalarField, flux: &BoundaryField) -> ScalarField {
        let bc = self.bc(flux);
        let st = Stencils::new(&self.grid);
        ScalarField::from_fn(&self.grid, |n, _| {
            self.r0 * st.d1(&bc, n, 0).eval(eta.values()) - self.kappa * st.laplacian(&bc, n).eval(eta.values())
        })
    }
}

/// `r₀∂₁η − κΔη = H − coupling` with `κ ∂η/∂n + L η = 0`, `L` given per face.
pub fn solve_robin_temperature(
    h: &ScalarField,
    r0: f64,
    coupling: &ScalarField,
    kappa: f64,
    l_face: &[f64],
    grid: &Grid,
) -> Result<ScalarField> {
    let beta: Vec<f64> = l_face.iter().map(|l| l / kappa).collect();
    let solver = RobinSolver::new(grid, r0, kappa, &beta)?;
    Ok(solver.solve(&h.sub(coupling), &BoundaryField::zeros(grid)))
}
