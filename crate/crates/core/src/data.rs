//! Volume and boundary data of the channel problem and their distance from
//! the constant-flow background.

use crate::error::{NsfError, Result};
use crate::field::{BoundaryField, ScalarField, VectorField};
use crate::grid::{Face, Grid, Patch};
use crate::norms;
use crate::stencil::{tangential_d1, FaceRule, ScalarBc};

/// Data of the full problem. `slip[c]` holds the tangential stress datum
/// `b·e_c` on every face whose normal axis differs from `c`; entries on faces
/// normal to `e_c` are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowData {
    pub force: VectorField,
    pub slip: Vec<BoundaryField>,
    /// Normal velocity `d = v·n`.
    pub normal_velocity: BoundaryField,
    /// Inflow density, in the node order of Γ_in.
    pub rho_in: Vec<f64>,
    /// Heat flux `g`.
    pub heat_flux: BoundaryField,
    /// Outside temperature variation `T₁`.
    pub wall_temperature: BoundaryField,
}

/// `n⁽¹⁾`: −1 on Γ_in, +1 on Γ_out, 0 on the walls.
pub fn axial_normal(grid: &Grid) -> BoundaryField {
    BoundaryField::from_fn(grid, |face, _, _| match face.patch() {
        Patch::Inflow => -1.0,
        Patch::Outflow => 1.0,
        Patch::Wall => 0.0,
    })
}

/// `α τ⁽¹⁾` written per component: `α` in the axial component on the walls.
pub fn reference_slip(grid: &Grid, alpha: f64) -> Vec<BoundaryField> {
    (0..grid.dim())
        .map(|c| BoundaryField::from_fn(grid, |face, _, _| if c == 0 && face.axis != 0 { alpha } else { 0.0 }))
        .collect()
}

/// Zeroes the entries of `slip[c]` on faces normal to `e_c`.
pub fn tangential_only(grid: &Grid, slip: &[BoundaryField]) -> Vec<BoundaryField> {
    slip.iter()
        .enumerate()
        .map(|(c, b)| {
            let mut out = b.clone();
            for face in grid.faces().filter(|f| f.axis == c) {
                out.face_mut(face).iter_mut().for_each(|v| *v = 0.0);
            }
            out
        })
        .collect()
}

impl FlowData {
    /// Data reproduced exactly by `(v̄, ρ̄, θ̄) = (e₁, 1, T₀)`.
    pub fn background(grid: &Grid, alpha: f64) -> Self {
        Self {
            force: VectorField::zeros(grid),
            slip: reference_slip(grid, alpha),
            normal_velocity: axial_normal(grid),
            rho_in: vec![1.0; grid.face_nodes(Face::INFLOW).len()],
            heat_flux: BoundaryField::zeros(grid),
            wall_temperature: BoundaryField::zeros(grid),
        }
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        let bad = |m: String| Err(NsfError::InvalidParameter(m));
        if self.force.dim() != grid.dim() || self.slip.len() != grid.dim() {
            return bad("data dimension does not match the grid".into());
        }
        if self.rho_in.len() != grid.face_nodes(Face::INFLOW).len() {
            return bad("inflow density has the wrong length".into());
        }
        for face in grid.faces() {
            let d = self.normal_velocity.face(face);
            let ok = match face.patch() {
                Patch::Inflow => d.iter().all(|&v| v < 0.0),
                Patch::Outflow => d.iter().all(|&v| v > 0.0),
                Patch::Wall => d.iter().all(|&v| v == 0.0),
            };
            if !ok {
                return bad(format!("normal velocity has the wrong sign on {:?}", face.patch()));
            }
        }
        if let Some(r) = self.rho_in.iter().find(|&&r| !(r > 0.0)) {
            return bad(format!("inflow density must be positive, got {r}"));
        }
        let finite = self.force.is_finite()
            && self.slip.iter().all(|b| b.max_abs().is_finite())
            && self.normal_velocity.max_abs().is_finite()
            && self.heat_flux.max_abs().is_finite()
            && self.wall_temperature.max_abs().is_finite();
        if !finite {
            return bad("non-finite data".into());
        }
        Ok(())
    }

    /// `d − n⁽¹⁾`, the part of the normal velocity carried by the lift.
    pub fn normal_excess(&self, grid: &Grid) -> BoundaryField {
        self.normal_velocity.zip_map(&axial_normal(grid), |a, b| a - b)
    }

    /// `b − ατ⁽¹⁾` per component, tangential entries only.
    pub fn slip_excess(&self, grid: &Grid, alpha: f64) -> Vec<BoundaryField> {
        let diff: Vec<BoundaryField> = self
            .slip
            .iter()
            .zip(reference_slip(grid, alpha))
            .map(|(b, r)| b.zip_map(&r, |x, y| x - y))
            .collect();
        tangential_only(grid, &diff)
    }

    /// `∂_c d` along every face whose axis differs from `c`, per component.
    pub fn normal_velocity_gradient(&self, grid: &Grid) -> Vec<BoundaryField> {
        (0..grid.dim())
            .map(|c| {
                let mut out = BoundaryField::zeros(grid);
                for face in grid.faces().filter(|f| f.axis != c) {
                    let d = tangential_d1(grid, face, self.normal_velocity.face(face), c);
                    out.face_mut(face).copy_from_slice(&d);
                }
                out
            })
            .collect()
    }

    /// Boundary rules of the full velocity: `μ(∂v_c/∂n + ∂_c d) + αv_c = b_c`
    /// for tangential components, one-sided differences for the normal one.
    pub fn velocity_bcs(&self, grid: &Grid, mu: f64, alpha: f64) -> Vec<ScalarBc> {
        let dd = self.normal_velocity_gradient(grid);
        (0..grid.dim())
            .map(|c| {
                let mut bc = ScalarBc::free(grid);
                for face in grid.faces().filter(|f| f.axis != c) {
                    let flux = self.slip[c].face(face).iter().zip(dd[c].face(face)).map(|(b, g)| b / mu - g).collect();
                    bc.set(face, FaceRule::Robin { beta: alpha / mu, flux });
                }
                bc
            })
            .collect()
    }

    pub fn rho_in_excess(&self, grid: &Grid) -> BoundaryField {
        let mut out = BoundaryField::zeros(grid);
        for (v, r) in out.face_mut(Face::INFLOW).iter_mut().zip(&self.rho_in) {
            *v = r - 1.0;
        }
        out
    }

    /// Data `background + s·(self − background)`.
    pub fn scaled_about_background(&self, grid: &Grid, alpha: f64, s: f64) -> Self {
        let bg = Self::background(grid, alpha);
        let mix_b = |a: &BoundaryField, b: &BoundaryField| b.zip_map(a, |x, y| x + s * (y - x));
        Self {
            force: bg.force.add(&self.force.sub(&bg.force).scaled(s)),
            slip: self.slip.iter().zip(&bg.slip).map(|(a, b)| mix_b(a, b)).collect(),
            normal_velocity: mix_b(&self.normal_velocity, &bg.normal_velocity),
            rho_in: self.rho_in.iter().map(|r| 1.0 + s * (r - 1.0)).collect(),
            heat_flux: self.heat_flux.scaled(s),
            wall_temperature: self.wall_temperature.scaled(s),
        }
    }
}

/// Terms of the data distance `D₀`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DataDistance {
    pub force: f64,
    pub slip: f64,
    pub normal_velocity: f64,
    pub rho_in: f64,
    pub heat_flux: f64,
    pub wall_temperature: f64,
}

impl DataDistance {
    pub fn total(&self) -> f64 {
        self.force + self.slip + self.normal_velocity + self.rho_in + self.heat_flux + self.wall_temperature
    }
}

/// `D₀` with trace norms replaced by boundary `L_p` plus tangential first
/// differences.
pub fn data_distance(grid: &Grid, data: &FlowData, alpha: f64, p: f64) -> DataDistance {
    let tr = |b: &BoundaryField| norms::trace_w1p(grid, b, p, None);
    DataDistance {
        force: norms::lp_vec(grid, &data.force, p),
        slip: data.slip_excess(grid, alpha).iter().map(tr).sum(),
        normal_velocity: tr(&data.normal_excess(grid)),
        rho_in: norms::trace_w1p(grid, &data.rho_in_excess(grid), p, Some(Patch::Inflow)),
        heat_flux: tr(&data.heat_flux),
        wall_temperature: tr(&data.wall_temperature),
    }
}

/// Inflow datum as a field on the first slice (zero elsewhere), handy for norms.
pub fn inflow_as_field(grid: &Grid, values: &[f64]) -> ScalarField {
    let mut f = ScalarField::zeros(grid);
    f.values_mut()[..values.len()].copy_from_slice(values);
    f
}
