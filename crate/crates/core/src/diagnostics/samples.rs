//! Deterministic random smooth fields for calibration and verification.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::{BoundaryField, ScalarField, VectorField};
use crate::grid::{Face, Grid};
use crate::picard::LinearProblemData;
use crate::transport::TransportProblem;

/// Number of cosine modes per axis.
const MODES: usize = 4;

pub struct SampleRng(ChaCha8Rng);

impl SampleRng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    fn coefficients(&mut self) -> Vec<f64> {
        (0..MODES * MODES).map(|_| self.0.gen_range(-1.0..1.0)).collect()
    }

    /// `m + Σ_{j+k>0} c_jk cos(jπx₁/l + φ) cos(kπx₂ + ψ) / (1 + j + k)²` with
    /// `|m| ∈ [½, 3/2]`, so no sample is dominated by its oscillation.
    pub fn scalar(&mut self, grid: &Grid) -> ScalarField {
        let mut c = self.coefficients();
        let m: f64 = self.0.gen_range(0.5..1.5);
        c[0] = if self.0.gen_bool(0.5) { m } else { -m };
        let (phi, psi): (f64, f64) = (self.0.gen_range(0.0..PI), self.0.gen_range(0.0..PI));
        let l = grid.domain().length();
        let mode = |j: usize, k: usize, x: [f64; 3]| {
            if j + k == 0 {
                1.0
            } else {
                (j as f64 * PI * x[0] / l + phi).cos() * (k as f64 * PI * x[1] + psi).cos()
            }
        };
        ScalarField::from_fn(grid, |_, x| {
            let mut v = 0.0;
            for j in 0..MODES {
                for k in 0..MODES {
                    let decay = 1.0 / ((1 + j + k) as f64).powi(2);
                    v += c[j * MODES + k] * decay * mode(j, k, x);
                }
            }
            v
        })
    }

    pub fn vector(&mut self, grid: &Grid) -> VectorField {
        VectorField::from_components((0..grid.dim()).map(|_| self.scalar(grid)).collect())
    }

    /// Smooth vector field with `U·n = 0` on every face, scaled to max norm `amplitude`.
    pub fn tangent(&mut self, grid: &Grid, amplitude: f64) -> VectorField {
        let mut v = VectorField::zeros(grid);
        for c in 0..grid.dim() {
            let ext = grid.domain().extent(c);
            let raw = self.scalar(grid);
            v[c] = ScalarField::from_fn(grid, |n, x| raw[n] * (PI * x[c] / ext).sin());
        }
        let m = v.max_abs();
        if m > 0.0 {
            v.scaled(amplitude / m)
        } else {
            v
        }
    }

    pub fn boundary(&mut self, grid: &Grid) -> BoundaryField {
        let f = self.scalar(grid);
        BoundaryField::from_fn(grid, |_, n, _| f[n])
    }

    pub fn inflow(&mut self, grid: &Grid) -> Vec<f64> {
        let f = self.scalar(grid);
        grid.face_nodes(Face::INFLOW).iter().map(|&n| f[n]).collect()
    }

    pub fn transport(&mut self, grid: &Grid, velocity_amplitude: f64) -> TransportProblem {
        let velocity = self.tangent(grid, velocity_amplitude);
        TransportProblem::new(velocity, self.scalar(grid), self.inflow(grid))
    }

    pub fn linear_data(&mut self, grid: &Grid, velocity_amplitude: f64) -> LinearProblemData {
        LinearProblemData {
            force: self.vector(grid),
            mass: self.scalar(grid),
            energy: self.scalar(grid),
            slip: (0..grid.dim()).map(|_| self.boundary(grid)).collect(),
            sigma_in: self.inflow(grid),
            velocity: self.tangent(grid, velocity_amplitude),
        }
    }
}
