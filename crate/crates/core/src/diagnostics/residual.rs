use serde::Serialize;

use crate::constitutive::{dissipation, Mat3, PhysicalParams, Thermo};
use crate::data::FlowData;
use crate::field::ScalarField;
use crate::grid::{Face, Grid};
use crate::error::Result;
use crate::picard::{assemble_fgh, FlowState, InnerSettings, LinearStepSolver, PhysicalFields, Setup};
use crate::stencil::{ScalarBc, Stencils};
use crate::background::temperature_bc;

/// Residuals of the steady NSF system in scaled discrete `L₂`
/// (`‖r‖_{L₂} / |measure|^{1/2}`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MainResidual {
    pub momentum: f64,
    pub continuity: f64,
    pub energy: f64,
    /// `S(∇v)n·τ + αv·τ − b·τ`, one-sided normal derivatives; skips
    /// components that are normal to another face through the node.
    pub slip: f64,
    pub normal_velocity: f64,
    pub inflow_density: f64,
    /// `κ∂θ/∂n + L(θ − T₀ − T₁) − g`, one-sided normal derivatives.
    pub heat_flux: f64,
}

impl MainResidual {
    /// Largest residual of the three balance laws.
    pub fn balance(&self) -> f64 {
        self.momentum.max(self.continuity).max(self.energy)
    }

    pub fn max(&self) -> f64 {
        self.balance().max(self.slip).max(self.normal_velocity).max(self.inflow_density).max(self.heat_flux)
    }
}

#[derive(Default)]
struct Rms {
    sum: f64,
    weight: f64,
}

impl Rms {
    fn add(&mut self, w: f64, r: f64) {
        self.sum += w * r * r;
        self.weight += w;
    }

    fn value(&self) -> f64 {
        if self.weight > 0.0 {
            (self.sum / self.weight).sqrt()
        } else {
            0.0
        }
    }
}

/// Pointwise residual fields of the balance laws; `None` where an equation is
/// replaced by a boundary condition (normal velocity on its own face,
/// continuity on the outflow slice).
pub struct BalanceFields {
    pub momentum: Vec<Vec<Option<f64>>>,
    pub continuity: Vec<Option<f64>>,
    pub energy: ScalarField,
}

impl BalanceFields {
    /// Scaled `L₂` norms of momentum, continuity and energy.
    pub fn rms(&self, grid: &Grid) -> [f64; 3] {
        let mut mom = Rms::default();
        let mut cont = Rms::default();
        let mut en = Rms::default();
        for n in 0..grid.n_nodes() {
            let w = grid.volume_weight(n);
            for comp in &self.momentum {
                if let Some(r) = comp[n] {
                    mom.add(w, r);
                }
            }
            if let Some(r) = self.continuity[n] {
                cont.add(w, r);
            }
            en.add(w, self.energy[n]);
        }
        [mom.value(), cont.value(), en.value()]
    }

    pub fn max_abs(&self) -> [f64; 3] {
        let max = |v: &[Option<f64>]| v.iter().flatten().fold(0.0f64, |m, r| m.max(r.abs()));
        let mom = self.momentum.iter().map(|c| max(c)).fold(0.0, f64::max);
        [mom, max(&self.continuity), self.energy.max_abs()]
    }
}

/// Discrete residuals of momentum, continuity (upwind, as transported) and
/// the internal energy balance
/// `ρ∂_θe v·∇θ + θ∂_θπ div v − κΔθ − S(∇v):∇v = 0`, with the boundary rules
/// of the data built into the stencils.
pub fn balance_fields(
    grid: &Grid,
    fields: &PhysicalFields,
    data: &FlowData,
    thermo: &Thermo,
    params: &PhysicalParams,
) -> BalanceFields {
    let d = grid.dim();
    let st = Stencils::new(grid);
    let vbc = data.velocity_bcs(grid, params.mu, params.alpha);
    let tbc = temperature_bc(grid, data, params);
    let free = ScalarBc::free(grid);
    let (v, rho, theta) = (&fields.v, &fields.rho, &fields.theta);
    let jac = st.jacobian(v, &vbc);
    let sdiv = st.stress_divergence(v, &vbc, params.mu, params.lambda);
    let grad_rho = st.gradient(rho, &free);
    let grad_theta = st.gradient(theta, &tbc);
    let lap_theta = st.laplacian_field(theta, &tbc);
    let stride = grid.stride(0);
    let last = grid.cells(0);

    let mut momentum = vec![vec![None; grid.n_nodes()]; d];
    let mut continuity = vec![None; grid.n_nodes()];
    let mut energy = ScalarField::zeros(grid);
    for n in 0..grid.n_nodes() {
        let (r, th) = (rho[n], theta[n]);
        let pi_rho = thermo.dp_drho(r, th);
        let pi_theta = thermo.dp_dtheta(r, th);
        let mut g: Mat3 = [[0.0; 3]; 3];
        for c in 0..d {
            for a in 0..d {
                g[c][a] = jac[c][a][n];
            }
        }
        let div: f64 = (0..d).map(|a| g[a][a]).sum();
        for c in 0..d {
            if grid.faces_of(n).any(|f| f.axis == c) {
                continue;
            }
            let convect: f64 = (0..d).map(|a| v[a][n] * g[c][a]).sum();
            let res = r * convect - sdiv[c][n] + pi_rho * grad_rho[c][n] + pi_theta * grad_theta[c][n]
                - r * data.force[c][n];
            momentum[c][n] = Some(res);
        }
        if grid.multi_index(n)[0] < last {
            let cross: f64 = (1..d)
                .map(|a| {
                    let wind = v[a][n];
                    if wind == 0.0 {
                        0.0
                    } else {
                        wind * st.upwind(n, a, wind).eval(rho.values())
                    }
                })
                .sum();
            let axial = v[0][n] * (rho[n + stride] - rho[n]) / grid.h(0);
            continuity[n] = Some(axial + cross + r * div);
        }
        let adv: f64 = (0..d).map(|a| v[a][n] * grad_theta[a][n]).sum();
        energy[n] = r * thermo.de_dtheta(r, th) * adv + th * pi_theta * div - params.kappa * lap_theta[n]
            - dissipation(&g, d, params.mu, params.lambda);
    }
    BalanceFields { momentum, continuity, energy }
}

/// Balance-law residuals plus the five boundary conditions.
pub fn residual_main_system(
    grid: &Grid,
    fields: &PhysicalFields,
    data: &FlowData,
    thermo: &Thermo,
    params: &PhysicalParams,
) -> MainResidual {
    let [momentum, continuity, energy] = balance_fields(grid, fields, data, thermo, params).rms(grid);

    let st = Stencils::new(grid);
    let dd = data.normal_velocity_gradient(grid);
    let mut slip = Rms::default();
    let mut normal = Rms::default();
    let mut inflow = Rms::default();
    let mut heat = Rms::default();
    let (v, rho, theta) = (&fields.v, &fields.rho, &fields.theta);
    for face in grid.faces() {
        let w = grid.face_weights(face);
        let l = params.heat_exchange(face);
        for (k, &n) in grid.face_nodes(face).iter().enumerate() {
            let s = face.outward_sign();
            normal.add(w[k], s * v[face.axis][n] - data.normal_velocity.face(face)[k]);
            // at edges the normal condition of the neighbouring face takes precedence
            for c in (0..grid.dim()).filter(|&c| grid.faces_of(n).all(|f| f.axis != c)) {
                let dn = st.one_sided_normal(n, face).eval(v[c].values());
                let r = params.mu * (dn + dd[c].face(face)[k]) + params.alpha * v[c][n] - data.slip[c].face(face)[k];
                slip.add(w[k], r);
            }
            let tn = st.one_sided_normal(n, face).eval(theta.values());
            let t1 = data.wall_temperature.face(face)[k];
            heat.add(w[k], params.kappa * tn + l * (theta[n] - params.t0 - t1) - data.heat_flux.face(face)[k]);
            if face == Face::INFLOW {
                inflow.add(w[k], rho[n] - data.rho_in[k]);
            }
        }
    }
    MainResidual {
        momentum,
        continuity,
        energy,
        slip: slip.value(),
        normal_velocity: normal.value(),
        inflow_density: inflow.value(),
        heat_flux: heat.value(),
    }
}

/// Scaled `L₂` residuals of the perturbation system `L(state) = (F, G, H)(state)`.
pub fn perturbation_residual(setup: &Setup, state: &FlowState) -> Result<[f64; 3]> {
    let data = assemble_fgh(setup, state)?;
    let solver = LinearStepSolver::for_setup(setup, InnerSettings::default())?;
    Ok(solver.block_residual_fields(&data, state).rms(&setup.grid))
}
