//! The effective transport identity `γσ + ∂₁σ + U·∇σ = K` evaluated with `K`
//! rebuilt from the Helmholtz decomposition of the velocity.

use crate::elliptic::{NeumannProblem, NeumannSolver};
use crate::error::Result;
use crate::field::{BoundaryField, ScalarField, VectorField};
use crate::grid::Grid;
use crate::norms::{d1_free, d2_free};
use crate::picard::{FlowState, LinearProblemData, LinearStepSolver};
use crate::stencil::{ScalarBc, Stencils};
use crate::transport::advection_residual;

/// `u = ∇φ + A` with `Δφ = div u`, `∂φ/∂n = u·n`, mean of `φ` zero.
#[derive(Debug, Clone)]
pub struct HelmholtzSplit {
    pub phi: ScalarField,
    pub gradient: VectorField,
    pub solenoidal: VectorField,
}

fn free_divergence(grid: &Grid, v: &VectorField) -> ScalarField {
    let mut div = ScalarField::zeros(grid);
    for c in 0..grid.dim() {
        div.axpy(1.0, &d1_free(grid, &v[c], c));
    }
    div
}

fn outward_normal(grid: &Grid, v: &VectorField) -> BoundaryField {
    BoundaryField::from_fn(grid, |face, n, _| face.outward_sign() * v[face.axis][n])
}

/// Least-squares potential of `v`: `Δψ = div v`, `∂ψ/∂n = v·n`, mean `mean`.
fn potential(solver: &NeumannSolver, grid: &Grid, v: &VectorField, mean: f64) -> Result<(ScalarField, BoundaryField)> {
    let flux = outward_normal(grid, v);
    let problem = NeumannProblem { rhs: free_divergence(grid, v), flux: flux.clone(), mean };
    Ok((solver.solve(&problem, true)?.u, flux))
}

pub fn helmholtz_split(grid: &Grid, u: &VectorField) -> Result<HelmholtzSplit> {
    let solver = NeumannSolver::new(grid)?;
    let (phi, flux) = potential(&solver, grid, u, 0.0)?;
    let gradient = Stencils::new(grid).gradient(&phi, &ScalarBc::neumann(grid, &flux));
    let solenoidal = u.sub(&gradient);
    Ok(HelmholtzSplit { phi, gradient, solenoidal })
}

#[derive(Debug, Clone)]
pub struct TransIdentity {
    pub k: ScalarField,
    pub residual: ScalarField,
    /// Discrete `L₂` norm of the residual over all slices but the outflow one.
    pub l2: f64,
}

/// Evaluates the identity at a linear-step state. `K̄ = −(λ + 4μ/3) div u + p₁σ`
/// is recovered as the potential of
/// `F − ∂₁u + μΔA − p₂∇η`, its constant fixed by the mean of the direct value.
pub fn trans_identity(solver: &LinearStepSolver, data: &LinearProblemData, state: &FlowState) -> Result<TransIdentity> {
    let grid = solver.grid();
    let coef = solver.coefficients();
    let stiff = coef.lambda + 4.0 * coef.mu / 3.0;
    let split = helmholtz_split(grid, &state.u)?;
    let mut rhs = data.force.clone();
    for c in 0..grid.dim() {
        rhs[c].axpy(-1.0, &d1_free(grid, &state.u[c], 0));
        for a in 0..grid.dim() {
            rhs[c].axpy(coef.mu, &d2_free(grid, &split.solenoidal[c], a, a));
        }
        rhs[c].axpy(-coef.p2, &d1_free(grid, &state.eta, c));
    }
    let mut direct = solver.div_u(data, &state.u).scaled(-stiff);
    direct.axpy(coef.p1, &state.sigma);
    let (k_bar, _) = potential(&NeumannSolver::new(grid)?, grid, &rhs, direct.mean(grid))?;
    let mut k = k_bar.scaled(1.0 / stiff);
    k.axpy(1.0, &data.mass);
    let residual = advection_residual(grid, &data.velocity, &state.sigma, coef.gamma()).sub(&k);
    let last = grid.cells(0);
    let l2 = (0..grid.n_nodes())
        .filter(|&n| grid.multi_index(n)[0] < last)
        .map(|n| grid.volume_weight(n) * residual[n] * residual[n])
        .sum::<f64>()
        .sqrt();
    Ok(TransIdentity { k, residual, l2 })
}
