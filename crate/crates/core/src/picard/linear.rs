use serde::{Deserialize, Serialize};

use crate::elliptic::{LameParams, LameProblem, LameSolver, RobinSolver};
use crate::diagnostics::BalanceFields;
use crate::error::{NsfError, Result};
use crate::field::{BoundaryField, ScalarField};
use crate::grid::Grid;
use crate::stencil::{ScalarBc, Stencils};
use crate::transport::{advection_residual, march, TransportProblem};

use super::assemble::LinearProblemData;
use super::setup::Setup;
use super::state::FlowState;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InnerSettings {
    pub tol: f64,
    pub max_sweeps: usize,
    pub stagnation_ratio: f64,
    pub stagnation_window: usize,
}

impl Default for InnerSettings {
    fn default() -> Self {
        Self { tol: 1e-11, max_sweeps: 200, stagnation_ratio: 0.999, stagnation_window: 20 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearStepReport {
    pub sweeps: usize,
    /// Weak-norm increment of the last sweep.
    pub increment: f64,
    /// Max-norm residuals of the momentum, mass and energy blocks.
    pub block_residuals: [f64; 3],
}

/// Coefficients of the linear system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearCoefficients {
    pub mu: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub kappa: f64,
    pub l_wall: f64,
    pub p1: f64,
    pub p2: f64,
    pub r0: f64,
    pub r1: f64,
}

impl LinearCoefficients {
    pub fn of(setup: &Setup) -> Self {
        let (p, l) = (&setup.params, &setup.lin);
        Self {
            mu: p.mu,
            lambda: p.lambda,
            alpha: p.alpha,
            kappa: p.kappa,
            l_wall: p.l_wall,
            p1: l.p1,
            p2: l.p2,
            r0: l.r0,
            r1: l.r1,
        }
    }

    pub fn gamma(&self) -> f64 {
        self.p1 / (self.lambda + 4.0 * self.mu / 3.0)
    }
}

/// Block Gauss–Seidel solver of the linear system: Lamé for `u` with the
/// pressure gradients on the right, the damped transport sweep
/// `γσ + (1+U¹)∂₁σ + U·∇σ = G − div u + γσ_prev` for `σ`, and the Robin
/// problem for `η`. The damping moves the part `γσ` of `div u` that the
/// Lamé block returns for a given density into the transport operator,
/// which keeps the splitting contractive. Factorizations are cached.
#[derive(Debug, Clone)]
pub struct LinearStepSolver {
    grid: Grid,
    coef: LinearCoefficients,
    lame: LameSolver,
    robin: RobinSolver,
    eta_bc: ScalarBc,
    pub settings: InnerSettings,
}

impl LinearStepSolver {
    pub fn new(grid: &Grid, coef: LinearCoefficients, settings: InnerSettings) -> Result<Self> {
        let lame = LameSolver::new(grid, LameParams::uniform(grid, coef.mu, coef.lambda, 1.0, coef.alpha))?;
        let beta: Vec<f64> = grid
            .faces()
            .map(|f| if f.patch() == crate::grid::Patch::Wall { coef.l_wall / coef.kappa } else { 0.0 })
            .collect();
        let robin = RobinSolver::new(grid, coef.r0, coef.kappa, &beta)?;
        let eta_bc = robin.bc(&BoundaryField::zeros(grid));
        Ok(Self { grid: grid.clone(), coef, lame, robin, eta_bc, settings })
    }

    pub fn for_setup(setup: &Setup, settings: InnerSettings) -> Result<Self> {
        Self::new(&setup.grid, LinearCoefficients::of(setup), settings)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coefficients(&self) -> &LinearCoefficients {
        &self.coef
    }

    fn momentum_rhs(&self, data: &LinearProblemData, sigma: &ScalarField, eta: &ScalarField) -> crate::field::VectorField {
        let st = Stencils::new(&self.grid);
        let gs = st.gradient(sigma, &ScalarBc::free(&self.grid));
        let ge = st.gradient(eta, &self.eta_bc);
        let mut rhs = data.force.clone();
        for c in 0..self.grid.dim() {
            rhs[c].axpy(-self.coef.p1, &gs[c]);
            rhs[c].axpy(-self.coef.p2, &ge[c]);
        }
        rhs
    }

    pub fn div_u(&self, data: &LinearProblemData, u: &crate::field::VectorField) -> ScalarField {
        Stencils::new(&self.grid).divergence(u, &self.lame.bcs(&data.slip))
    }

    fn sweep(&self, data: &LinearProblemData, s: &FlowState) -> Result<FlowState> {
        let gamma = self.coef.gamma();
        let u = self.lame.solve(&LameProblem { force: self.momentum_rhs(data, &s.sigma, &s.eta), slip: data.slip.clone() });
        let div = self.div_u(data, &u);
        let mut source = data.mass.sub(&div);
        source.axpy(gamma, &s.sigma);
        let transport = TransportProblem::new(data.velocity.clone(), source, data.sigma_in.clone()).with_damping(gamma);
        let sigma = march(&transport, &self.grid)?;
        let eta = self.robin.solve(&data.energy.sub(&div.scaled(self.coef.r1)), &BoundaryField::zeros(&self.grid));
        Ok(FlowState { u, sigma, eta })
    }

    /// Pointwise residuals of the three blocks at `s`, masked like the
    /// physical balance laws.
    pub fn block_residual_fields(&self, data: &LinearProblemData, s: &FlowState) -> BalanceFields {
        let grid = &self.grid;
        let d = grid.dim();
        let lhs = self.lame.apply(&s.u, &data.slip);
        let rhs = self.momentum_rhs(data, &s.sigma, &s.eta);
        let momentum = (0..d)
            .map(|c| {
                (0..grid.n_nodes())
                    .map(|n| grid.faces_of(n).all(|f| f.axis != c).then(|| lhs[c][n] - rhs[c][n]))
                    .collect()
            })
            .collect();
        let div = self.div_u(data, &s.u);
        let adv = advection_residual(grid, &data.velocity, &s.sigma, 0.0);
        let last = grid.cells(0);
        let continuity = (0..grid.n_nodes())
            .map(|n| (grid.multi_index(n)[0] < last).then(|| adv[n] + div[n] - data.mass[n]))
            .collect();
        let er = self.robin.apply(&s.eta, &BoundaryField::zeros(grid));
        let energy = ScalarField::from_fn(grid, |n, _| er[n] + self.coef.r1 * div[n] - data.energy[n]);
        BalanceFields { momentum, continuity, energy }
    }

    /// Max-norm residuals of the momentum, mass and energy blocks at `s`.
    pub fn block_residuals(&self, data: &LinearProblemData, s: &FlowState) -> [f64; 3] {
        self.block_residual_fields(data, s).max_abs()
    }

    /// Block Gauss–Seidel from `initial` until the weak-norm increment drops
    /// below `tol · max(1, ‖state‖)` or `max_sweeps` is reached.
    pub fn solve(&self, data: &LinearProblemData, initial: &FlowState) -> Result<(FlowState, LinearStepReport)> {
        let grid = &self.grid;
        let cfg = self.settings;
        let mut state = initial.clone();
        let mut last_inc = f64::INFINITY;
        let mut slow = 0;
        let mut sweeps = 0;
        let mut inc = f64::INFINITY;
        while sweeps < cfg.max_sweeps {
            let next = self.sweep(data, &state)?;
            sweeps += 1;
            inc = next.weak_distance(grid, &state);
            state = next;
            if !inc.is_finite() {
                return Err(NsfError::InnerStagnation {
                    sweeps,
                    increment: inc,
                    block_residuals: self.block_residuals(data, &state),
                });
            }
            if inc <= cfg.tol * state.weak_norm(grid).max(1.0) {
                break;
            }
            slow = if inc >= cfg.stagnation_ratio * last_inc { slow + 1 } else { 0 };
            if slow >= cfg.stagnation_window {
                return Err(NsfError::InnerStagnation {
                    sweeps,
                    increment: inc,
                    block_residuals: self.block_residuals(data, &state),
                });
            }
            last_inc = inc;
        }
        let block_residuals = self.block_residuals(data, &state);
        Ok((state, LinearStepReport { sweeps, increment: inc, block_residuals }))
    }
}
