use rayon::prelude::*;

use super::TransportProblem;
use crate::error::{NsfError, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::Grid;
use crate::stencil::Stencils;

/// `max Σ_a |U_a/(1+U¹)| h₁/h_a` over the grid; the sweep is monotone when ≤ 1.
pub fn cfl_ratio(grid: &Grid, velocity: &VectorField) -> f64 {
    (0..grid.n_nodes())
        .map(|n| {
            let axial = 1.0 + velocity[0][n];
            (1..grid.dim()).map(|a| (velocity[a][n] / axial).abs() * grid.h(0) / grid.h(a)).sum::<f64>()
        })
        .fold(0.0, f64::max)
}

fn cross_advection(st: &Stencils, velocity: &VectorField, w: &[f64], node: usize) -> f64 {
    (1..st.grid().dim())
        .map(|a| {
            let wind = velocity[a][node];
            if wind == 0.0 {
                0.0
            } else {
                wind * st.upwind(node, a, wind).eval(w)
            }
        })
        .sum()
}

/// Explicit upwind sweep of `(1+U¹)D₁⁺w + Σ U_a D_a^up w + γw = h`, slice by slice.
pub fn march(p: &TransportProblem, grid: &Grid) -> Result<ScalarField> {
    p.validate(grid)?;
    let ratio = cfl_ratio(grid, &p.velocity);
    if ratio > 1.0 {
        return Err(NsfError::MarchingCfl { ratio });
    }
    let st = Stencils::new(grid);
    let stride = grid.stride(0);
    let h1 = grid.h(0);
    let mut w = vec![0.0; grid.n_nodes()];
    w[..stride].copy_from_slice(&p.inflow);
    for i0 in 0..grid.cells(0) {
        let next: Vec<f64> = grid
            .slice_nodes(i0)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|n| {
                let axial = 1.0 + p.velocity[0][n];
                let rate = p.source[n] - p.damping * w[n] - cross_advection(&st, &p.velocity, &w, n);
                w[n] + h1 * rate / axial
            })
            .collect();
        let start = (i0 + 1) * stride;
        w[start..start + stride].copy_from_slice(&next);
    }
    Ok(ScalarField::from_values(w))
}

/// Residual operator of [`march`]: `(1+U¹)D₁⁺w + Σ U_a D_a^up w + γw` on
/// slices `0..n₀`, zero on the outflow slice.
pub fn advection_residual(grid: &Grid, velocity: &VectorField, w: &ScalarField, gamma: f64) -> ScalarField {
    let st = Stencils::new(grid);
    let stride = grid.stride(0);
    let h1 = grid.h(0);
    let last = grid.cells(0);
    ScalarField::from_fn(grid, |n, _| {
        if grid.multi_index(n)[0] == last {
            return 0.0;
        }
        let axial = 1.0 + velocity[0][n];
        axial * (w[n + stride] - w[n]) / h1 + cross_advection(&st, velocity, w.values(), n) + gamma * w[n]
    })
}
