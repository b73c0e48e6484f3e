use crate::background::{temperature_bc, BackgroundState, Lift};
use crate::constitutive::{LinearizationConstants, PhysicalParams, Thermo};
use crate::data::FlowData;
use crate::error::Result;
use crate::field::{BoundaryField, ScalarField, VectorField};
use crate::grid::Grid;
use crate::stencil::{free_bcs, slip_bcs, ScalarBc, Stencils};

use super::state::{check_density, FlowState, PhysicalFields};

/// Everything the perturbation system needs that does not change between
/// iterations: data, laws, background, lift and the slip datum `B`.
#[derive(Debug)]
pub struct Setup {
    pub grid: Grid,
    pub params: PhysicalParams,
    pub thermo: Thermo,
    pub data: FlowData,
    pub background: BackgroundState,
    pub lift: Lift,
    pub lin: LinearizationConstants,
    /// `B_c` of the perturbation slip condition, per component.
    pub slip: Vec<BoundaryField>,
    /// `σ_in = ρ_in − 1`.
    pub sigma_in: Vec<f64>,
    pub(crate) theta_bar: ScalarField,
    pub(crate) grad_u0: Vec<Vec<ScalarField>>,
    pub(crate) div_u0: ScalarField,
    pub(crate) stress_div_u0: VectorField,
}

impl Setup {
    pub fn new(grid: &Grid, params: PhysicalParams, thermo: Thermo, data: FlowData) -> Result<Self> {
        params.validate()?;
        data.validate(grid)?;
        let lin = thermo.linearization();
        let background = BackgroundState::build(grid, &data, &params, lin.r0)?;
        let lift = Lift::for_data(&data, grid)?;
        let st = Stencils::new(grid);
        let free = free_bcs(grid);
        let grad_u0 = st.jacobian(&lift.u0, &free);
        let div_u0 = st.divergence(&lift.u0, &free);
        let stress_div_u0 = st.stress_divergence(&lift.u0, &free, params.mu, params.lambda);
        let slip = perturbation_slip(grid, &data, &lift, &params);
        let sigma_in = data.rho_in.iter().map(|r| r - 1.0).collect();
        let theta_bar = background.theta();
        Ok(Self {
            grid: grid.clone(),
            params,
            thermo,
            data,
            background,
            lift,
            lin,
            slip,
            sigma_in,
            theta_bar,
            grad_u0,
            div_u0,
            stress_div_u0,
        })
    }

    pub fn u_bcs(&self) -> Vec<ScalarBc> {
        slip_bcs(&self.grid, self.params.mu, &vec![self.params.alpha; self.grid.n_faces()], &self.slip)
    }

    pub fn eta_bc(&self) -> ScalarBc {
        let beta: Vec<f64> = self.grid.faces().map(|f| self.params.heat_exchange(f) / self.params.kappa).collect();
        ScalarBc::robin(&self.grid, &beta, &BoundaryField::zeros(&self.grid))
    }

    pub fn theta_bc(&self) -> ScalarBc {
        temperature_bc(&self.grid, &self.data, &self.params)
    }

    pub fn theta_bar(&self) -> &ScalarField {
        &self.theta_bar
    }

    /// `γ = p₁/(λ + 4μ/3)`.
    pub fn gamma(&self) -> f64 {
        self.params.gamma(self.lin.p1)
    }

    /// `v = e₁ + u + u₀`, `ρ = 1 + σ`, `θ = θ̄ + η`.
    pub fn reconstruct(&self, state: &FlowState) -> Result<PhysicalFields> {
        let mut v = state.u.add(&self.lift.u0);
        v[0] = v[0].map(|x| x + 1.0);
        let rho = state.sigma.map(|s| 1.0 + s);
        check_density(&rho)?;
        Ok(PhysicalFields { v, rho, theta: self.theta_bar.add(&state.eta) })
    }

    pub fn perturbation_of(&self, fields: &PhysicalFields) -> FlowState {
        let mut u = fields.v.sub(&self.lift.u0);
        u[0] = u[0].map(|x| x - 1.0);
        FlowState { u, sigma: fields.rho.map(|r| r - 1.0), eta: fields.theta.sub(&self.theta_bar) }
    }
}

/// `B_c = b_c − ατ⁽¹⁾_c − μ(∂u₀_c/∂n + ∂_c d) − αu₀_c`, the normal derivative
/// of `u₀` taken one-sided so that the slip rule of `u` plus the one-sided
/// rule of `u₀` add up to the slip rule of `v`.
fn perturbation_slip(grid: &Grid, data: &FlowData, lift: &Lift, params: &PhysicalParams) -> Vec<BoundaryField> {
    let st = Stencils::new(grid);
    let excess = data.slip_excess(grid, params.alpha);
    let dd = data.normal_velocity_gradient(grid);
    let (mu, alpha) = (params.mu, params.alpha);
    (0..grid.dim())
        .map(|c| {
            BoundaryField::from_fn(grid, |face, node, _| {
                if face.axis == c {
                    return 0.0;
                }
                let pos = grid.face_position(face, node).expect("node on face");
                let u0 = &lift.u0[c];
                let dn = st.one_sided_normal(node, face).eval(u0.values());
                excess[c].face(face)[pos] - mu * (dn + dd[c].face(face)[pos]) - alpha * u0[node]
            })
        })
        .collect()
}
