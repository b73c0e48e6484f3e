//! The constant-flow background `(v̄, ρ̄, θ̄) = (e₁, 1, θ̄₀ + θ̄₁)` and the
//! lift `u₀ = ∇φ` of the normal-velocity datum.

use serde::Serialize;

use crate::constitutive::PhysicalParams;
use crate::data::FlowData;
use crate::elliptic::{NeumannProblem, NeumannSolver, RobinSolver};
use crate::error::Result;
use crate::field::{BoundaryField, ScalarField, VectorField};
use crate::grid::Grid;
use crate::norms;
use crate::stencil::{FaceRule, ScalarBc, Stencils};

/// `c_g = (1/|Ω|) ∫_Γ g dS`.
pub fn compute_cg(grid: &Grid, g: &BoundaryField) -> f64 {
    g.integral(grid) / grid.domain().volume()
}

#[derive(Debug, Clone)]
pub struct Theta0 {
    pub field: ScalarField,
    pub c_g: f64,
    /// Constant removed from the source to make the Neumann data compatible.
    pub projection: f64,
}

impl Theta0 {
    /// Source `c` actually satisfied by the discrete solution, `−κΔθ̄₀ = c`.
    pub fn effective_source(&self, kappa: f64) -> f64 {
        self.c_g + kappa * self.projection
    }
}

/// `−κΔθ̄₀ = c_g`, `κ ∂θ̄₀/∂n = g`, mean `T₀`, solved with compatibility projection.
pub fn solve_theta0(g: &BoundaryField, t0: f64, kappa: f64, grid: &Grid) -> Result<Theta0> {
    let c_g = compute_cg(grid, g);
    let problem = NeumannProblem {
        rhs: ScalarField::constant(grid, -c_g / kappa),
        flux: g.scaled(1.0 / kappa),
        mean: t0,
    };
    let sol = NeumannSolver::new(grid)?.solve(&problem, true)?;
    Ok(Theta0 { field: sol.u, c_g, projection: sol.projection })
}

fn theta0_bc(grid: &Grid, g: &BoundaryField, kappa: f64) -> ScalarBc {
    ScalarBc::neumann(grid, &g.scaled(1.0 / kappa))
}

/// `r₀∂₁θ̄₁ − κΔθ̄₁ = −r₀∂₁θ̄₀ − c` with `κ∂θ̄₁/∂n + L(θ̄₁ − (T₁ + T₀ − θ̄₀)) = 0`.
pub fn solve_theta1(
    theta0: &Theta0,
    g: &BoundaryField,
    t1: &BoundaryField,
    r0: f64,
    params: &PhysicalParams,
    grid: &Grid,
) -> Result<ScalarField> {
    let kappa = params.kappa;
    let beta: Vec<f64> = grid.faces().map(|f| params.heat_exchange(f) / kappa).collect();
    let solver = RobinSolver::new(grid, r0, kappa, &beta)?;
    let st = Stencils::new(grid);
    let d1 = st.d1_field(&theta0.field, &theta0_bc(grid, g, kappa), 0);
    let c = theta0.effective_source(kappa);
    let rhs = d1.map(|v| -r0 * v - c);
    let flux = BoundaryField::from_fn(grid, |face, node, _| {
        let pos = grid.face_position(face, node).expect("node on face");
        beta[face.id()] * (t1.face(face)[pos] + params.t0 - theta0.field[node])
    });
    Ok(solver.solve(&rhs, &flux))
}

/// Background temperature and its construction diagnostics.
#[derive(Debug, Clone)]
pub struct BackgroundState {
    pub theta0: ScalarField,
    pub theta1: ScalarField,
    pub c_g: f64,
    pub projection: f64,
    pub t0: f64,
    /// `‖θ̄₁‖_{W¹₂} / (‖T₁‖_{L₂(Γ)} + ‖g‖_{L₂(Γ)})`, when the data do not vanish.
    pub theta1_ratio: Option<f64>,
}

/// Bound on `theta1_ratio` above which the background is flagged.
pub const THETA1_RATIO_LIMIT: f64 = 10.0;

impl BackgroundState {
    pub fn build(grid: &Grid, data: &FlowData, params: &PhysicalParams, r0: f64) -> Result<Self> {
        params.validate()?;
        let th0 = solve_theta0(&data.heat_flux, params.t0, params.kappa, grid)?;
        let theta1 = solve_theta1(&th0, &data.heat_flux, &data.wall_temperature, r0, params, grid)?;
        let size = norms::trace_lp(grid, &data.wall_temperature, 2.0, None) + norms::trace_lp(grid, &data.heat_flux, 2.0, None);
        let theta1_ratio = (size > 0.0).then(|| norms::w1p(grid, &theta1, 2.0) / size);
        Ok(Self { theta0: th0.field, theta1, c_g: th0.c_g, projection: th0.projection, t0: params.t0, theta1_ratio })
    }

    /// `θ̄ = θ̄₀ + θ̄₁`.
    pub fn theta(&self) -> ScalarField {
        self.theta0.add(&self.theta1)
    }

    pub fn theta1_flagged(&self) -> bool {
        self.theta1_ratio.is_some_and(|r| r > THETA1_RATIO_LIMIT)
    }

    pub fn axial_velocity(grid: &Grid) -> VectorField {
        VectorField::from_fn(grid, |_, _| {
            let mut v = vec![0.0; grid.dim()];
            v[0] = 1.0;
            v
        })
    }
}

/// Boundary rule of the full temperature: `κ∂θ/∂n + L(θ − T₀ − T₁) = g`.
pub fn temperature_bc(grid: &Grid, data: &FlowData, params: &PhysicalParams) -> ScalarBc {
    let kappa = params.kappa;
    let mut bc = ScalarBc::free(grid);
    for face in grid.faces() {
        let l = params.heat_exchange(face);
        let flux = data
            .heat_flux
            .face(face)
            .iter()
            .zip(data.wall_temperature.face(face))
            .map(|(g, t1)| (g + l * (params.t0 + t1)) / kappa)
            .collect();
        bc.set(face, FaceRule::Robin { beta: l / kappa, flux });
    }
    bc
}

/// `u₀ = ∇φ` with `Δφ = (1/|Ω|)∫_Γ d̃`, `∂φ/∂n = d̃`.
#[derive(Debug, Clone)]
pub struct Lift {
    pub phi: ScalarField,
    pub u0: VectorField,
    pub source: f64,
    pub projection: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LiftSummary {
    pub source: f64,
    pub projection: f64,
}

/// Lift of an arbitrary normal datum; the normal component of `u₀` equals
/// the datum exactly at boundary nodes.
pub fn build_lift(datum: &BoundaryField, grid: &Grid) -> Result<Lift> {
    let source = datum.integral(grid) / grid.domain().volume();
    let problem = NeumannProblem { rhs: ScalarField::constant(grid, source), flux: datum.clone(), mean: 0.0 };
    let sol = NeumannSolver::new(grid)?.solve(&problem, true)?;
    let u0 = Stencils::new(grid).gradient(&sol.u, &ScalarBc::neumann(grid, datum));
    Ok(Lift { phi: sol.u, u0, source, projection: sol.projection })
}

impl Lift {
    /// Lift of `d − n⁽¹⁾`, the part of the normal velocity not carried by `v̄`.
    pub fn for_data(data: &FlowData, grid: &Grid) -> Result<Self> {
        build_lift(&data.normal_excess(grid), grid)
    }

    pub fn summary(&self) -> LiftSummary {
        LiftSummary { source: self.source, projection: self.projection }
    }
}
