//! Direct solvers for the linear elliptic building blocks: Neumann Poisson,
//! Robin convection–diffusion, Lamé with slip and screened Neumann, plus the
//! Helmholtz decomposition and vorticity extraction.
//!
//! All operators are assembled from [`crate::stencil`] rows and factorized
//! once with the banded LU; a solver object can be reused for any number of
//! right-hand sides and shared read-only across threads.

mod helmholtz;
mod lame;
mod neumann;
mod robin;
mod screened;
mod vorticity;

pub use helmholtz::{helmholtz_decompose, HelmholtzParts, HelmholtzSolver};
pub use lame::{LameParams, LameProblem, LameSolver};
pub use neumann::{solve_neumann, NeumannProblem, NeumannSolution, NeumannSolver};
pub use robin::{solve_robin_temperature, RobinSolver};
pub use screened::ScreenedSolver;
pub use vorticity::{vorticity, wall_vorticity_defect, Vorticity};

use crate::banded::TripletBuilder;
use crate::stencil::Affine;

/// Moves the linear part of each row into a triplet matrix; `map` converts a
/// field-local node index to a global unknown index.
pub(crate) fn push_row(t: &mut TripletBuilder, row: usize, st: &Affine, scale: f64, map: impl Fn(usize) -> usize) {
    for &(n, c) in &st.terms {
        t.add(row, map(n), scale * c);
    }
}
