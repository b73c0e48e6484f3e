use crate::field::{BoundaryField, ScalarField, VectorField};
use crate::grid::{Face, Grid};
use crate::stencil::{ScalarBc, Stencils};

/// Curl of a velocity field: a scalar in d=2, a vector in d=3.
#[derive(Debug, Clone)]
pub enum Vorticity {
    Planar(ScalarField),
    Spatial(VectorField),
}

/// Centered-difference curl with one-sided stencils at the boundary.
pub fn vorticity(u: &VectorField, grid: &Grid) -> Vorticity {
    let st = Stencils::new(grid);
    let bc = ScalarBc::free(grid);
    let d = |c: usize, a: usize| st.d1_field(&u[c], &bc, a);
    if grid.dim() == 2 {
        Vorticity::Planar(d(1, 0).sub(&d(0, 1)))
    } else {
        Vorticity::Spatial(VectorField::from_components(vec![
            d(2, 1).sub(&d(1, 2)),
            d(0, 2).sub(&d(2, 0)),
            d(1, 0).sub(&d(0, 1)),
        ]))
    }
}

/// Largest defect of the flat-wall relation `ω = ∓(B − α u₁)/μ` on the d=2
/// walls `x₂ = 0` (upper sign) and `x₂ = 1`, for a field with `u·n = 0`.
pub fn wall_vorticity_defect(u: &VectorField, slip_axial: &BoundaryField, mu: f64, alpha: f64, grid: &Grid) -> f64 {
    assert_eq!(grid.dim(), 2, "wall relation is implemented for d = 2");
    let Vorticity::Planar(omega) = vorticity(u, grid) else { unreachable!() };
    let mut worst = 0.0f64;
    for face in [Face::new(1, crate::grid::Side::Low), Face::new(1, crate::grid::Side::High)] {
        let s = face.outward_sign();
        for (k, &n) in grid.face_nodes(face).iter().enumerate() {
            let i0 = grid.multi_index(n)[0];
            if i0 == 0 || i0 == grid.cells(0) {
                continue;
            }
            let expected = -s * (slip_axial.face(face)[k] - alpha * u[0][n]) / mu;
            worst = worst.max((omega[n] - expected).abs());
        }
    }
    worst
}
