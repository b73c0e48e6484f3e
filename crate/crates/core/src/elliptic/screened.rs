use crate::banded::{BandLu, TripletBuilder};
use crate::error::Result;
use crate::field::ScalarField;
use crate::grid::Grid;
use crate::stencil::{ScalarBc, Stencils};

use super::push_row;

/// Factorized `−Δr + r` with `∂r/∂n = 0`.
#[derive(Debug, Clone)]
pub struct ScreenedSolver {
    lu: BandLu,
}

impl ScreenedSolver {
    pub fn new(grid: &Grid) -> Result<Self> {
        let st = Stencils::new(grid);
        let bc = ScalarBc::homogeneous_neumann(grid);
        let mut t = TripletBuilder::new(grid.n_nodes());
        for node in 0..grid.n_nodes() {
            push_row(&mut t, node, &st.laplacian(&bc, node), -1.0, |m| m);
            t.add(node, node, 1.0);
        }
        Ok(Self { lu: t.into_band().factor()? })
    }

    pub fn solve(&self, rhs: &ScalarField) -> ScalarField {
        ScalarField::from_values(self.lu.solve(rhs.values()))
    }
}
