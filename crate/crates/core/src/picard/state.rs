use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{NsfError, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::Grid;
use crate::norms;

/// Density below which a reconstructed state is rejected.
pub const RHO_MIN: f64 = 0.1;

/// Perturbation `(u, σ, η) = (v − v̄ − u₀, ρ − 1, θ − θ̄)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub u: VectorField,
    pub sigma: ScalarField,
    pub eta: ScalarField,
}

/// Physical fields `(v, ρ, θ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalFields {
    pub v: VectorField,
    pub rho: ScalarField,
    pub theta: ScalarField,
}

impl FlowState {
    pub fn zeros(grid: &Grid) -> Self {
        Self { u: VectorField::zeros(grid), sigma: ScalarField::zeros(grid), eta: ScalarField::zeros(grid) }
    }

    /// Largest `|u·n|` over boundary nodes.
    pub fn normal_trace(&self, grid: &Grid) -> f64 {
        grid.faces()
            .flat_map(|f| grid.face_nodes(f).iter().map(move |&n| self.u[f.axis][n].abs()))
            .fold(0.0, f64::max)
    }

    pub fn check(&self, grid: &Grid) -> Result<()> {
        if !(self.u.is_finite() && self.sigma.is_finite() && self.eta.is_finite()) {
            return Err(NsfError::InvalidParameter("state has non-finite entries".into()));
        }
        check_density(&self.sigma.map(|s| 1.0 + s))?;
        let un = self.normal_trace(grid);
        if un > 1e-10 {
            return Err(NsfError::InvalidParameter(format!("state violates n·u = 0 (|u·n| = {un:.3e})")));
        }
        Ok(())
    }

    /// `‖u‖_{W¹₂} + ‖σ‖_{L∞(L₂)} + ‖η‖_{W¹₂}`.
    pub fn weak_norm(&self, grid: &Grid) -> f64 {
        norms::w1p_vec(grid, &self.u, 2.0) + norms::sup_slice_l2(grid, &self.sigma) + norms::w1p(grid, &self.eta, 2.0)
    }

    /// `‖u‖_{W²_p} + ‖σ‖_{W¹_p} + ‖η‖_{W²_p}`.
    pub fn strong_norm(&self, grid: &Grid, p: f64) -> f64 {
        norms::w2p_vec(grid, &self.u, p) + norms::w1p(grid, &self.sigma, p) + norms::w2p(grid, &self.eta, p)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { u: self.u.sub(&other.u), sigma: self.sigma.sub(&other.sigma), eta: self.eta.sub(&other.eta) }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { u: self.u.scaled(s), sigma: self.sigma.scaled(s), eta: self.eta.scaled(s) }
    }

    pub fn weak_distance(&self, grid: &Grid, other: &Self) -> f64 {
        self.sub(other).weak_norm(grid)
    }

    /// Smooth random state with unit-size modes, `u·n = 0` on every face.
    pub fn random_smooth(grid: &Grid, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = grid.domain().length();
        let d = grid.dim();
        let mut coef = |n: usize| -> Vec<f64> { (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect() };
        let cu: Vec<Vec<f64>> = (0..d).map(|_| coef(4)).collect();
        let cs = coef(4);
        let ce = coef(4);
        let pi = std::f64::consts::PI;
        let modes = |c: &[f64], x: [f64; 3], base: f64| {
            let s = (pi * x[0] / l).cos() + x[1];
            base * (c[0] + c[1] * s + c[2] * (2.0 * s).sin() + c[3] * (pi * x[1]).cos() * (pi * x[0] / l).sin())
        };
        let u = VectorField::from_fn(grid, |_, x| {
            (0..d)
                .map(|c| {
                    // vanishes on both faces normal to e_c
                    let t = x[c] / grid.domain().extent(c);
                    modes(&cu[c], x, (pi * t).sin())
                })
                .collect()
        });
        Self {
            u,
            sigma: ScalarField::from_fn(grid, |_, x| modes(&cs, x, 1.0)),
            eta: ScalarField::from_fn(grid, |_, x| modes(&ce, x, 1.0)),
        }
    }
}

pub(crate) fn check_density(rho: &ScalarField) -> Result<()> {
    match rho.values().iter().enumerate().find(|(_, r)| !(**r >= RHO_MIN)) {
        Some((node, &rho)) => Err(NsfError::DensityPositivity { node, rho }),
        None => Ok(()),
    }
}
