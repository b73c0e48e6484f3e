use crate::constitutive::{dissipation, Mat3};
use crate::error::Result;
use crate::field::{BoundaryField, ScalarField, VectorField};
use crate::stencil::{ScalarBc, Stencils};

use super::setup::Setup;
use super::state::FlowState;

/// Right-hand sides and transport velocity of one linear step.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProblemData {
    /// `F`.
    pub force: VectorField,
    /// `G`.
    pub mass: ScalarField,
    /// `H`.
    pub energy: ScalarField,
    /// `B_c`, per component.
    pub slip: Vec<BoundaryField>,
    pub sigma_in: Vec<f64>,
    /// `U = u + u₀`.
    pub velocity: VectorField,
}

/// Evaluates `F, G, H` at `state`. Every derivative uses the discrete
/// operator of the linear step (slip rule for `u`, Robin rule for `η`,
/// one-sided for `σ` and `u₀`), so that a fixed point of the iteration
/// solves the discrete nonlinear system exactly.
///
/// With `w = u + u₀`, `ρ = 1 + σ`, `θ = θ̄ + η` and `π, e` at `(ρ, θ)`:
///
/// * `F = ρf − ∂₁u₀ + div S(∇u₀) − σ∂₁w − ρ w·∇w − ∂_ρπ∇σ − ∂_θπ∇θ + p₁∇σ + p₂∇η`
/// * `G = −ρ div u₀ − σ div u`
/// * `H = S(∇w):∇w − ρ∂_θe w·∇θ − (θ∂_θπ − r₁) div u − θ∂_θπ div u₀ + (r₀ − ρ∂_θe)∂₁θ`
pub fn assemble_fgh(setup: &Setup, state: &FlowState) -> Result<LinearProblemData> {
    let grid = &setup.grid;
    let d = grid.dim();
    let st = Stencils::new(grid);
    let p = &setup.params;
    let lin = setup.lin;
    let free = ScalarBc::free(grid);

    let grad_u = st.jacobian(&state.u, &setup.u_bcs());
    let grad_sigma = st.gradient(&state.sigma, &free);
    let grad_eta = st.gradient(&state.eta, &setup.eta_bc());
    let theta = setup.theta_bar.add(&state.eta);
    let grad_theta = st.gradient(&theta, &setup.theta_bc());
    let velocity = state.u.add(&setup.lift.u0);
    let f = &setup.data.force;

    let mut force = VectorField::zeros(grid);
    let mut mass = ScalarField::zeros(grid);
    let mut energy = ScalarField::zeros(grid);
    for n in 0..grid.n_nodes() {
        let sigma = state.sigma[n];
        let rho = 1.0 + sigma;
        let th = theta[n];
        setup.thermo.check_state(n, rho, th)?;
        let pi_rho = setup.thermo.dp_drho(rho, th);
        let pi_theta = setup.thermo.dp_dtheta(rho, th);
        let e_theta = setup.thermo.de_dtheta(rho, th);

        let mut gw: Mat3 = [[0.0; 3]; 3];
        for c in 0..d {
            for a in 0..d {
                gw[c][a] = grad_u[c][a][n] + setup.grad_u0[c][a][n];
            }
        }
        let w: Vec<f64> = (0..d).map(|a| velocity[a][n]).collect();
        for c in 0..d {
            let convect: f64 = (0..d).map(|a| w[a] * gw[c][a]).sum();
            force[c][n] = rho * f[c][n] - setup.grad_u0[c][0][n] + setup.stress_div_u0[c][n]
                - sigma * gw[c][0]
                - rho * convect
                - (pi_rho - lin.p1) * grad_sigma[c][n]
                - pi_theta * grad_theta[c][n]
                + lin.p2 * grad_eta[c][n];
        }
        let div_u: f64 = (0..d).map(|a| grad_u[a][a][n]).sum();
        let div_u0 = setup.div_u0[n];
        mass[n] = -rho * div_u0 - sigma * div_u;
        let w_grad_theta: f64 = (0..d).map(|a| w[a] * grad_theta[a][n]).sum();
        energy[n] = dissipation(&gw, d, p.mu, p.lambda) - rho * e_theta * w_grad_theta
            - (th * pi_theta - lin.r1) * div_u
            - th * pi_theta * div_u0
            + (lin.r0 - rho * e_theta) * grad_theta[0][n];
    }
    Ok(LinearProblemData {
        force,
        mass,
        energy,
        slip: setup.slip.clone(),
        sigma_in: setup.sigma_in.clone(),
        velocity,
    })
}
