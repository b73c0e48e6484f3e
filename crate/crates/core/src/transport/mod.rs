//! Steady transport `∂₁w + U·∇w + γw = h` with inflow data on Γ_in.
//!
//! [`march`] is the production upwind sweep in `x₁`; the characteristic
//! construction in [`characteristics`] integrates along the flow of
//! `ũ = (1 + U¹, U², U³)` and serves as an independent oracle.

mod characteristics;
mod marching;

pub use characteristics::{
    apply_s_characteristic, build_characteristics, default_step, CharacteristicMap, FnVelocity, GridVelocity,
    Trajectory, VelocitySampler,
};
pub use marching::{advection_residual, cfl_ratio, march};

pub use crate::norms::sup_slice_l2;

use crate::error::{NsfError, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::{Face, Grid, Patch};

/// Tolerance on `U·n` at wall nodes.
pub const WALL_TANGENCY_TOL: f64 = 1e-12;
/// Lower bound on the axial speed `1 + U¹`.
pub const MIN_AXIAL_SPEED: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct TransportProblem {
    /// Perturbation velocity `U`; the transported field moves with `ũ`.
    pub velocity: VectorField,
    pub source: ScalarField,
    /// Inflow datum in the node order of Γ_in.
    pub inflow: Vec<f64>,
    /// Zeroth-order coefficient `γ ≥ 0`.
    pub damping: f64,
}

impl TransportProblem {
    pub fn new(velocity: VectorField, source: ScalarField, inflow: Vec<f64>) -> Self {
        Self { velocity, source, inflow, damping: 0.0 }
    }

    pub fn with_damping(mut self, gamma: f64) -> Self {
        self.damping = gamma;
        self
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        let bad = |msg: String| Err(NsfError::TransportPrecondition(msg));
        if self.velocity.dim() != grid.dim() || self.source.len() != grid.n_nodes() {
            return bad("field sizes do not match the grid".into());
        }
        if self.inflow.len() != grid.face_nodes(Face::INFLOW).len() {
            return bad(format!("inflow datum has {} values, Γ_in has {} nodes", self.inflow.len(), grid.face_nodes(Face::INFLOW).len()));
        }
        if !(self.damping >= 0.0 && self.damping.is_finite()) {
            return bad(format!("damping must be non-negative, got {}", self.damping));
        }
        if !self.velocity.is_finite() || !self.source.is_finite() || self.inflow.iter().any(|v| !v.is_finite()) {
            return bad("non-finite data".into());
        }
        for face in grid.faces().filter(|f| f.patch() == Patch::Wall) {
            for &n in grid.face_nodes(face) {
                let un = self.velocity[face.axis][n];
                if un.abs() > WALL_TANGENCY_TOL {
                    return bad(format!("U·n = {un:.3e} at wall node {n}"));
                }
            }
        }
        let slowest = self.velocity[0].values().iter().fold(f64::INFINITY, |m, &v| m.min(1.0 + v));
        if slowest < MIN_AXIAL_SPEED {
            return bad(format!("axial speed 1 + U1 drops to {slowest:.3} < {MIN_AXIAL_SPEED}"));
        }
        Ok(())
    }
}
