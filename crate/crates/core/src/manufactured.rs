//! Manufactured solutions for the convergence studies.
//!
//! Each case picks an analytic field, derives the data by applying the
//! continuous operator by hand, solves on the given grid and returns the
//! discrete max-norm error.

use std::f64::consts::PI;

use serde::Serialize;

use crate::elliptic::{LameParams, LameProblem, LameSolver, NeumannProblem, NeumannSolver, RobinSolver};
use crate::error::Result;
use crate::field::{BoundaryField, ScalarField, VectorField};
use crate::diagnostics::trans_identity;
use crate::grid::{ChannelDomain, Face, Grid};
use crate::transport::{
    apply_s_characteristic, build_characteristics, default_step, march, FnVelocity, GridVelocity, TransportProblem,
};
use crate::picard::{FlowState, InnerSettings, LinearCoefficients, LinearProblemData, LinearStepSolver};

/// Least-squares slope of `log(err)` against `log(h)`.
pub fn fit_order(h: &[f64], err: &[f64]) -> f64 {
    let xs: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = err.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Grid of the `l = 2` acceptance channel with `n` cells along `x₁` and `n/2` across.
pub fn channel_grid(n: usize) -> Result<Grid> {
    Grid::build(ChannelDomain::new(2.0, 2)?, &[n, (n / 2).max(4)])
}

fn max_error(a: &ScalarField, b: &ScalarField) -> f64 {
    a.sub(b).max_abs()
}

/// `u* = cos(πx₁/l) cos(πx₂)` with homogeneous Neumann data.
pub fn neumann_case(grid: &Grid) -> Result<f64> {
    let k = PI / grid.domain().length();
    let exact = ScalarField::from_fn(grid, |_, x| (k * x[0]).cos() * (PI * x[1]).cos());
    let rhs = exact.scaled(-(k * k + PI * PI));
    let sol = NeumannSolver::new(grid)?.solve(
        &NeumannProblem { rhs, flux: BoundaryField::zeros(grid), mean: exact.mean(grid) },
        true,
    )?;
    Ok(max_error(&sol.u, &exact))
}

/// `η* = cos(πx₁/l)(1 + r x₂ − r x₂²)`, `r = L/κ`, which satisfies the
/// homogeneous Robin condition on the walls and Neumann on Γ_in, Γ_out.
pub fn robin_case(grid: &Grid, r0: f64, kappa: f64, l_wall: f64) -> Result<f64> {
    let k = PI / grid.domain().length();
    let r = l_wall / kappa;
    let q = |y: f64| 1.0 + r * y - r * y * y;
    let exact = ScalarField::from_fn(grid, |_, x| (k * x[0]).cos() * q(x[1]));
    let rhs = ScalarField::from_fn(grid, |_, x| {
        let dx = -k * (k * x[0]).sin() * q(x[1]);
        let lap = -k * k * (k * x[0]).cos() * q(x[1]) - 2.0 * r * (k * x[0]).cos();
        r0 * dx - kappa * lap
    });
    let beta: Vec<f64> = grid.faces().map(|f| if f.axis == 0 { 0.0 } else { r }).collect();
    let eta = RobinSolver::new(grid, r0, kappa, &beta)?.solve(&rhs, &BoundaryField::zeros(grid));
    Ok(max_error(&eta, &exact))
}

/// Analytic field with value and Jacobian `jac[c][a] = ∂_a u_c`.
pub struct AnalyticVector {
    pub value: Box<dyn Fn([f64; 3]) -> [f64; 3] + Send + Sync>,
    pub jacobian: Box<dyn Fn([f64; 3]) -> [[f64; 3]; 3] + Send + Sync>,
}

impl AnalyticVector {
    pub fn sample(&self, grid: &Grid) -> VectorField {
        VectorField::from_fn(grid, |_, x| (self.value)(x)[..grid.dim()].to_vec())
    }

    /// Slip datum `B_c = μ s(∂_a u_c + ∂_c u_a) + α u_c` on each face `(a, s)`.
    pub fn slip_data(&self, grid: &Grid, mu: f64, alpha: &[f64]) -> Vec<BoundaryField> {
        (0..grid.dim())
            .map(|c| {
                BoundaryField::from_fn(grid, |face, _, x| {
                    if face.axis == c {
                        return 0.0;
                    }
                    let j = (self.jacobian)(x);
                    let a = face.axis;
                    mu * face.outward_sign() * (j[c][a] + j[a][c]) + alpha[face.id()] * (self.value)(x)[c]
                })
            })
            .collect()
    }
}

/// `u* = (sin(πx₁/l) cos(πx₂), cos(πx₁/l) sin(πx₂))`, tangent to every face.
pub fn lame_field(l: f64) -> AnalyticVector {
    let k = PI / l;
    AnalyticVector {
        value: Box::new(move |x| {
            [(k * x[0]).sin() * (PI * x[1]).cos(), (k * x[0]).cos() * (PI * x[1]).sin(), 0.0]
        }),
        jacobian: Box::new(move |x| {
            let (sx, cx) = (k * x[0]).sin_cos();
            let (sy, cy) = (PI * x[1]).sin_cos();
            [[k * cx * cy, -PI * sx * sy, 0.0], [-k * sx * sy, PI * cx * cy, 0.0], [0.0; 3]]
        }),
    }
}

/// `a ∂₁u* − μΔu* − (μ/3 + λ)∇div u*` for [`lame_field`].
pub fn lame_force(grid: &Grid, p: &LameParams) -> VectorField {
    let k = PI / grid.domain().length();
    let m = PI;
    let g = p.mu / 3.0 + p.lambda;
    VectorField::from_fn(grid, |_, x| {
        let (sx, cx) = (k * x[0]).sin_cos();
        let (sy, cy) = (m * x[1]).sin_cos();
        let lap = -(k * k + m * m);
        vec![
            p.convection * k * cx * cy - p.mu * lap * sx * cy + g * k * (k + m) * sx * cy,
            -p.convection * k * sx * sy - p.mu * lap * cx * sy + g * m * (k + m) * cx * sy,
        ]
    })
}

pub fn lame_case(grid: &Grid, params: &LameParams) -> Result<f64> {
    let field = lame_field(grid.domain().length());
    let exact = field.sample(grid);
    let problem = LameProblem {
        force: lame_force(grid, params),
        slip: field.slip_data(grid, params.mu, &params.alpha),
    };
    let u = LameSolver::new(grid, params.clone())?.solve(&problem);
    Ok(u.sub(&exact).max_abs())
}

/// Data of the coupled linear step whose solution is `(u*, σ*, η*)` with `u*`
/// from [`lame_field`], `σ* = ½cos(πx₁/l)cos(πx₂)`, `η*` as in [`robin_case`]
/// and transport velocity `U = u*/5`.
pub fn linear_step_problem(grid: &Grid, coef: &LinearCoefficients) -> (LinearProblemData, FlowState) {
    let l = grid.domain().length();
    let k = PI / l;
    let m = PI;
    let r = coef.l_wall / coef.kappa;
    let field = lame_field(l);
    let u_exact = field.sample(grid);
    let sigma = |x: [f64; 3]| 0.5 * (k * x[0]).cos() * (m * x[1]).cos();
    let dsigma = |x: [f64; 3]| {
        [-0.5 * k * (k * x[0]).sin() * (m * x[1]).cos(), -0.5 * m * (k * x[0]).cos() * (m * x[1]).sin()]
    };
    let q = |y: f64| 1.0 + r * y - r * y * y;
    let eta = |x: [f64; 3]| (k * x[0]).cos() * q(x[1]);
    let deta = |x: [f64; 3]| [-k * (k * x[0]).sin() * q(x[1]), (k * x[0]).cos() * (r - 2.0 * r * x[1])];
    let lap_eta = |x: [f64; 3]| -k * k * eta(x) - 2.0 * r * (k * x[0]).cos();
    let div_u = |x: [f64; 3]| (k + m) * (k * x[0]).cos() * (m * x[1]).cos();

    let lame = LameParams::uniform(grid, coef.mu, coef.lambda, 1.0, coef.alpha);
    let mut force = lame_force(grid, &lame);
    for n in 0..grid.n_nodes() {
        let x = grid.coords(n);
        let (gs, ge) = (dsigma(x), deta(x));
        for c in 0..2 {
            force[c][n] += coef.p1 * gs[c] + coef.p2 * ge[c];
        }
    }
    let velocity = u_exact.scaled(0.2);
    let mass = ScalarField::from_fn(grid, |n, x| {
        let gs = dsigma(x);
        div_u(x) + (1.0 + velocity[0][n]) * gs[0] + velocity[1][n] * gs[1]
    });
    let energy = ScalarField::from_fn(grid, |_, x| coef.r0 * deta(x)[0] + coef.r1 * div_u(x) - coef.kappa * lap_eta(x));
    let sigma_in = grid.face_nodes(crate::grid::Face::INFLOW).iter().map(|&n| sigma(grid.coords(n))).collect();
    let data = LinearProblemData {
        force,
        mass,
        energy,
        slip: field.slip_data(grid, coef.mu, &lame.alpha),
        sigma_in,
        velocity,
    };
    let exact = FlowState {
        u: u_exact,
        sigma: ScalarField::from_fn(grid, |_, x| sigma(x)),
        eta: ScalarField::from_fn(grid, |_, x| eta(x)),
    };
    (data, exact)
}

/// Max-norm errors of `u, σ, η` of the linear step on [`linear_step_problem`].
pub fn linear_step_case(grid: &Grid, coef: LinearCoefficients) -> Result<[f64; 3]> {
    let (data, exact) = linear_step_problem(grid, &coef);
    let solver = LinearStepSolver::new(grid, coef, InnerSettings::default())?;
    let (sol, _) = solver.solve(&data, &FlowState::zeros(grid))?;
    Ok([
        sol.u.sub(&exact.u).max_abs(),
        max_error(&sol.sigma, &exact.sigma),
        max_error(&sol.eta, &exact.eta),
    ])
}

/// Cross-flow of the transport studies; tangent to the walls, `|U| ≤ 0.1`.
pub fn transport_velocity(x: [f64; 3]) -> [f64; 3] {
    [0.1 * x[1] - 0.05, 0.1 * (PI * x[1]).sin() * (1.0 + 0.5 * x[0].sin()), 0.0]
}

/// Max-norm distance between the marched and the characteristic solution of
/// `(1+U¹)∂₁w + U·∇w = 1 + x₁x₂`, `w_in = cos(πx₂)`.
pub fn transport_case(grid: &Grid) -> Result<f64> {
    let velocity = VectorField::from_fn(grid, |_, x| transport_velocity(x)[..grid.dim()].to_vec());
    let source = ScalarField::from_fn(grid, |_, x| 1.0 + x[0] * x[1]);
    let inflow = grid.face_nodes(Face::INFLOW).iter().map(|&n| (PI * grid.coords(n)[1]).cos()).collect();
    let problem = TransportProblem::new(velocity, source, inflow);
    let marched = march(&problem, grid)?;
    let map = build_characteristics(&GridVelocity { grid, field: &problem.velocity }, grid, default_step(grid))?;
    Ok(marched.sub(&apply_s_characteristic(&problem, grid, &map)?).max_abs())
}

/// Largest deviation of the traced characteristics of `U = (0, εx₂(1 − x₂))`
/// from the closed form `z/(z + (1 − z)e^{−εs})`.
pub fn logistic_case(grid: &Grid, eps: f64) -> Result<f64> {
    let sampler = FnVelocity(move |x: [f64; 3]| [0.0, eps * x[1] * (1.0 - x[1]), 0.0]);
    let ds = default_step(grid);
    let map = build_characteristics(&sampler, grid, ds)?;
    let mut worst = 0.0f64;
    for t in &map.trajectories {
        let z = t.start[1];
        for (k, p) in t.points.iter().enumerate() {
            let exact = z / (z + (1.0 - z) * (-eps * k as f64 * ds).exp());
            worst = worst.max((p[1] - exact).abs());
        }
    }
    Ok(worst)
}

/// `L₂` residual of the effective transport identity at the linear-step
/// solution of [`linear_step_problem`].
pub fn trans_identity_case(grid: &Grid, coef: LinearCoefficients) -> Result<f64> {
    let (data, _) = linear_step_problem(grid, &coef);
    let solver = LinearStepSolver::new(grid, coef, InnerSettings::default())?;
    let (sol, _) = solver.solve(&data, &FlowState::zeros(grid))?;
    Ok(trans_identity(&solver, &data, &sol)?.l2)
}

/// One row of a convergence table.
#[derive(Debug, Clone, Serialize)]
pub struct StudyRow {
    pub case: String,
    pub resolution: usize,
    pub h: f64,
    pub error: f64,
}

/// Case names of [`convergence_study`] with the order each must reach:
/// `(name, lowest, highest)`.
pub const STUDY_CASES: [(&str, f64, f64); 6] = [
    ("neumann", 1.7, 2.3),
    ("robin", 1.7, 2.3),
    ("lame", 1.7, 2.3),
    ("linear_step", 0.9, f64::INFINITY),
    ("transport", 0.9, f64::INFINITY),
    ("trans_identity", 0.9, f64::INFINITY),
];

#[derive(Debug, Clone, Serialize)]
pub struct StudyOrder {
    pub case: String,
    pub order: f64,
    pub lowest: f64,
    pub highest: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Study {
    pub rows: Vec<StudyRow>,
    pub orders: Vec<StudyOrder>,
}

impl Study {
    pub fn pass(&self) -> bool {
        self.orders.iter().all(|o| o.pass)
    }

    pub fn order(&self, case: &str) -> Option<f64> {
        self.orders.iter().find(|o| o.case == case).map(|o| o.order)
    }
}

fn study_error(case: &str, grid: &Grid, coef: &LinearCoefficients) -> Result<f64> {
    match case {
        "neumann" => neumann_case(grid),
        "robin" => robin_case(grid, coef.r0, coef.kappa, coef.l_wall),
        "lame" => lame_case(grid, &LameParams::uniform(grid, coef.mu, coef.lambda, 0.0, coef.alpha)),
        "linear_step" => Ok(linear_step_case(grid, *coef)?.into_iter().fold(0.0, f64::max)),
        "transport" => transport_case(grid),
        "trans_identity" => trans_identity_case(grid, *coef),
        other => unreachable!("unknown study case {other}"),
    }
}

/// Errors of every manufactured case on `channel_grid(n)` for each `n` and
/// the fitted orders.
pub fn convergence_study(resolutions: &[usize], coef: &LinearCoefficients) -> Result<Study> {
    let mut rows = Vec::new();
    let mut orders = Vec::new();
    for (case, lowest, highest) in STUDY_CASES {
        let (mut hs, mut errs) = (Vec::new(), Vec::new());
        for &n in resolutions {
            let grid = channel_grid(n)?;
            let error = study_error(case, &grid, coef)?;
            rows.push(StudyRow { case: case.to_string(), resolution: n, h: grid.h(0), error });
            hs.push(grid.h(0));
            errs.push(error);
        }
        let order = fit_order(&hs, &errs);
        let pass = order >= lowest && order <= highest;
        orders.push(StudyOrder { case: case.to_string(), order, lowest, highest, pass });
    }
    Ok(Study { rows, orders })
}
