//! Both sides of the functional inequalities and a priori estimates, each
//! written as `lhs ≤ C·rhs`.

use serde::{Deserialize, Serialize};

use crate::elliptic::ScreenedSolver;
use crate::field::{ScalarField, VectorField};
use crate::grid::{Grid, Patch};
use crate::norms;
use crate::picard::{FlowState, LinearProblemData};
use crate::transport::TransportProblem;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityVerdict {
    pub id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    pub pass: bool,
}

impl InequalityVerdict {
    pub fn new(id: &str, (lhs, rhs): (f64, f64), constant: f64) -> Self {
        Self { id: id.to_string(), lhs, rhs, constant, pass: lhs <= constant * rhs }
    }

    /// `lhs / rhs`, zero when both sides vanish.
    pub fn ratio(&self) -> f64 {
        ratio(self.lhs, self.rhs)
    }
}

pub fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs <= 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

fn sq_trace(grid: &Grid, f: &ScalarField, patch: Patch) -> f64 {
    let mut s = 0.0;
    for face in grid.faces().filter(|f| f.patch() == patch) {
        for (w, n) in grid.face_weights(face).iter().zip(grid.face_nodes(face)) {
            s += w * f[*n] * f[*n];
        }
    }
    s
}

fn sq_grad(grid: &Grid, f: &ScalarField) -> f64 {
    (0..grid.dim()).map(|a| norms::lp(grid, &norms::d1_free(grid, f, a), 2.0).powi(2)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PoincareVariant {
    /// `‖u‖²_{L₂(Γ_out)} ≤ C_P(‖u‖²_{L₂(Γ_in)} + ‖∇u‖²_{L₂})`.
    BoundaryToBoundary,
    /// `‖u‖²_{L₂(Ω)} ≤ C_P(‖u‖²_{L₂(Γ_in)} + ‖∇u‖²_{L₂})`.
    BoundaryToVolume,
}

impl PoincareVariant {
    pub fn id(self) -> &'static str {
        match self {
            PoincareVariant::BoundaryToBoundary => "poincare_boundary",
            PoincareVariant::BoundaryToVolume => "poincare_volume",
        }
    }
}

pub fn poincare_sides(grid: &Grid, u: &ScalarField, variant: PoincareVariant) -> (f64, f64) {
    let rhs = sq_trace(grid, u, Patch::Inflow) + sq_grad(grid, u);
    let lhs = match variant {
        PoincareVariant::BoundaryToBoundary => sq_trace(grid, u, Patch::Outflow),
        PoincareVariant::BoundaryToVolume => norms::lp(grid, u, 2.0).powi(2),
    };
    (lhs, rhs)
}

/// `∫μ|∇u + ∇ᵀu − ⅔ div u I|² + ∫_Γ (α|u_τ|² + (u·n)²)`.
pub fn korn_form(grid: &Grid, u: &VectorField, mu: f64, alpha: f64) -> f64 {
    let d = grid.dim();
    let jac: Vec<Vec<ScalarField>> =
        (0..d).map(|c| (0..d).map(|a| norms::d1_free(grid, &u[c], a)).collect()).collect();
    let mut volume = 0.0;
    for n in 0..grid.n_nodes() {
        let div: f64 = (0..d).map(|a| jac[a][a][n]).sum();
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                let e = jac[i][j][n] + jac[j][i][n] - if i == j { 2.0 / 3.0 * div } else { 0.0 };
                s += e * e;
            }
        }
        volume += grid.volume_weight(n) * mu * s;
    }
    let mut boundary = 0.0;
    for face in grid.faces() {
        for (w, &n) in grid.face_weights(face).iter().zip(grid.face_nodes(face)) {
            let tang: f64 = (0..d).filter(|&c| c != face.axis).map(|c| u[c][n] * u[c][n]).sum();
            boundary += w * (alpha * tang + u[face.axis][n].powi(2));
        }
    }
    volume + boundary
}

/// `‖u‖²_{W¹₂} ≤ K·(Korn form)`, i.e. the Korn inequality with `C = 1/K`.
pub fn korn_sides(grid: &Grid, u: &VectorField, mu: f64, alpha: f64) -> (f64, f64) {
    (norms::w1p_vec(grid, u, 2.0).powi(2), korn_form(grid, u, mu, alpha))
}

/// `‖f‖_{L_p} − ε‖∇f‖_{L_p} ≤ C(ε)‖f‖_{L₂}` (left side clipped at zero).
pub fn interpolation_sides(grid: &Grid, f: &ScalarField, eps: f64, p: f64) -> (f64, f64) {
    let grad = (0..grid.dim())
        .map(|a| norms::lp(grid, &norms::d1_free(grid, f, a), p).powf(p))
        .sum::<f64>()
        .powf(1.0 / p);
    ((norms::lp(grid, f, p) - eps * grad).max(0.0), norms::lp(grid, f, 2.0))
}

pub fn interpolation_id(eps: f64) -> String {
    format!("interpolation_eps_{eps}")
}

/// `V*` surrogate: `‖r‖_{W¹₂}` with `(−Δ + I)r = F` componentwise, zero Neumann data.
pub fn dual_norm(grid: &Grid, screened: &ScreenedSolver, f: &VectorField) -> f64 {
    let r = VectorField::from_components(f.components().iter().map(|c| screened.solve(c)).collect());
    norms::w1p_vec(grid, &r, 2.0)
}

/// Weak norms of a linear-step solution against the data norms.
pub fn energy_sides(grid: &Grid, screened: &ScreenedSolver, data: &LinearProblemData, sol: &FlowState) -> (f64, f64) {
    let rhs = dual_norm(grid, screened, &data.force)
        + norms::lp(grid, &data.mass, 2.0)
        + norms::lp(grid, &data.energy, 2.0)
        + data.slip.iter().map(|b| norms::trace_lp(grid, b, 2.0, None)).sum::<f64>()
        + inflow_l2(grid, &data.sigma_in);
    (sol.weak_norm(grid), rhs)
}

pub fn inflow_l2(grid: &Grid, values: &[f64]) -> f64 {
    let w = grid.face_weights(crate::grid::Face::INFLOW);
    w.iter().zip(values).map(|(w, v)| w * v * v).sum::<f64>().sqrt()
}

/// `‖w‖_{L∞(L₂)} ≤ C(‖w_in‖_{L₂(Γ_in)} + ‖h‖_{L₂})`.
pub fn transport_sides(grid: &Grid, p: &TransportProblem, w: &ScalarField) -> (f64, f64) {
    (norms::sup_slice_l2(grid, w), inflow_l2(grid, &p.inflow) + norms::lp(grid, &p.source, 2.0))
}
