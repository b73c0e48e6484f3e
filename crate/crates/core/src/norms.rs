//! Discrete Lebesgue, Sobolev, trace and slice norms.
//!
//! Volume norms use the trapezoidal node weights; derivatives use the free
//! (one-sided at faces) stencils, with a four-point one-sided formula for
//! pure second derivatives so that the boundary rows stay consistent.

use crate::field::{BoundaryField, ScalarField, VectorField};
use crate::grid::{Face, Grid, Patch};
use crate::stencil::{tangential_d1, ScalarBc, Stencils};

fn weighted_lp(values: impl Iterator<Item = (f64, f64)>, p: f64) -> f64 {
    if p.is_infinite() {
        return values.fold(0.0, |m, (_, v)| m.max(v.abs()));
    }
    values.map(|(w, v)| w * v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
}

/// `‖f‖_{L^p(Ω)}`; `p = ∞` gives the max norm.
pub fn lp(grid: &Grid, f: &ScalarField, p: f64) -> f64 {
    weighted_lp((0..grid.n_nodes()).map(|n| (grid.volume_weight(n), f[n])), p)
}

fn combine(parts: impl Iterator<Item = f64>, p: f64) -> f64 {
    if p.is_infinite() {
        parts.fold(0.0, f64::max)
    } else {
        parts.map(|v| v.powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// First derivative with one-sided formulas at faces.
pub fn d1_free(grid: &Grid, f: &ScalarField, axis: usize) -> ScalarField {
    Stencils::new(grid).d1_field(f, &ScalarBc::free(grid), axis)
}

/// Second derivative `∂_a∂_b`; pure derivatives use `(2, −5, 4, −1)/h²` at faces.
pub fn d2_free(grid: &Grid, f: &ScalarField, a: usize, b: usize) -> ScalarField {
    if a != b {
        return Stencils::new(grid).d2_field(f, &ScalarBc::free(grid), a, b);
    }
    let h2 = grid.h(a) * grid.h(a);
    let s = grid.stride(a) as isize;
    let last = grid.cells(a);
    ScalarField::from_fn(grid, |n, _| {
        let i = grid.multi_index(n)[a];
        let at = |k: isize| f[(n as isize + k * s) as usize];
        if i == 0 {
            (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) / h2
        } else if i == last {
            (2.0 * at(0) - 5.0 * at(-1) + 4.0 * at(-2) - at(-3)) / h2
        } else {
            (at(1) - 2.0 * at(0) + at(-1)) / h2
        }
    })
}

pub fn w1p(grid: &Grid, f: &ScalarField, p: f64) -> f64 {
    let grads = (0..grid.dim()).map(|a| lp(grid, &d1_free(grid, f, a), p));
    combine(std::iter::once(lp(grid, f, p)).chain(grads), p)
}

pub fn w2p(grid: &Grid, f: &ScalarField, p: f64) -> f64 {
    let d = grid.dim();
    let mut parts = vec![w1p(grid, f, p)];
    for a in 0..d {
        for b in a..d {
            let v = lp(grid, &d2_free(grid, f, a, b), p);
            // mixed derivatives appear twice in the full Hessian
            parts.push(if a == b || p.is_infinite() { v } else { v * 2f64.powf(1.0 / p) });
        }
    }
    combine(parts.into_iter(), p)
}

pub fn lp_vec(grid: &Grid, v: &VectorField, p: f64) -> f64 {
    combine(v.components().iter().map(|c| lp(grid, c, p)), p)
}

pub fn w1p_vec(grid: &Grid, v: &VectorField, p: f64) -> f64 {
    combine(v.components().iter().map(|c| w1p(grid, c, p)), p)
}

pub fn w2p_vec(grid: &Grid, v: &VectorField, p: f64) -> f64 {
    combine(v.components().iter().map(|c| w2p(grid, c, p)), p)
}

/// `L^p` norm of boundary data over the faces of `patch` (all faces if `None`).
/// Nodes shared by several faces count once per face, as in the face integrals.
pub fn trace_lp(grid: &Grid, b: &BoundaryField, p: f64, patch: Option<Patch>) -> f64 {
    let mut items = Vec::new();
    for face in grid.faces().filter(|f| patch.is_none_or(|p| f.patch() == p)) {
        let w = grid.face_weights(face);
        items.extend(w.into_iter().zip(b.face(face).iter().copied()));
    }
    weighted_lp(items.into_iter(), p)
}

fn face_tangential_lp(grid: &Grid, face: Face, values: &[f64], p: f64) -> f64 {
    let w = grid.face_weights(face);
    let parts = (0..grid.dim()).filter(|&a| a != face.axis).map(|a| {
        let d = tangential_d1(grid, face, values, a);
        weighted_lp(w.iter().copied().zip(d), p)
    });
    combine(parts, p)
}

/// Surrogate for the fractional trace norm `W^{1−1/p}_p(Γ)`: the `W¹_p`
/// norm along each face, which dominates it.
pub fn trace_w1p(grid: &Grid, b: &BoundaryField, p: f64, patch: Option<Patch>) -> f64 {
    let mut parts = vec![trace_lp(grid, b, p, patch)];
    for face in grid.faces().filter(|f| patch.is_none_or(|p| f.patch() == p)) {
        parts.push(face_tangential_lp(grid, face, b.face(face), p));
    }
    combine(parts.into_iter(), p)
}

/// Surrogate for `W^{2−1/p}_p(Γ)` (tangential second differences included).
pub fn trace_w2p(grid: &Grid, b: &BoundaryField, p: f64, patch: Option<Patch>) -> f64 {
    let mut parts = vec![trace_w1p(grid, b, p, patch)];
    for face in grid.faces().filter(|f| patch.is_none_or(|p| f.patch() == p)) {
        let vals = b.face(face);
        let nodes = grid.face_nodes(face);
        let w = grid.face_weights(face);
        for a in (0..grid.dim()).filter(|&a| a != face.axis) {
            let h2 = grid.h(a) * grid.h(a);
            let last = grid.cells(a);
            let items: Vec<(f64, f64)> = nodes
                .iter()
                .enumerate()
                .map(|(k, &n)| {
                    let i = grid.multi_index(n)[a];
                    let dir: isize = if i == 0 { 1 } else if i == last { -1 } else { 0 };
                    let at = |off: isize| {
                        let m = grid.neighbor(n, a, off).expect("neighbor on face");
                        vals[grid.face_position(face, m).expect("same face")]
                    };
                    let d = if dir == 0 {
                        (at(1) - 2.0 * vals[k] + at(-1)) / h2
                    } else {
                        (2.0 * vals[k] - 5.0 * at(dir) + 4.0 * at(2 * dir) - at(3 * dir)) / h2
                    };
                    (w[k], d)
                })
                .collect();
            parts.push(weighted_lp(items.into_iter(), p));
        }
    }
    combine(parts.into_iter(), p)
}

/// `L²` norm of `f` on the slice `x₁ = i₀ h₁`.
pub fn slice_l2(grid: &Grid, f: &ScalarField, i0: usize) -> f64 {
    let w = grid.slice_weights();
    grid.slice_nodes(i0).zip(&w).map(|(n, w)| w * f[n] * f[n]).sum::<f64>().sqrt()
}

/// `sup_{x₁} ‖f(x₁, ·)‖_{L²(Σ)}`.
pub fn sup_slice_l2(grid: &Grid, f: &ScalarField) -> f64 {
    (0..grid.nodes_along(0)).map(|i| slice_l2(grid, f, i)).fold(0.0, f64::max)
}

/// Every norm of one scalar field; boundary traces per patch in `L²`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct NormReport {
    pub field: String,
    pub p: f64,
    pub l2: f64,
    pub lp: f64,
    pub w12: f64,
    pub w1p: f64,
    pub w2p: f64,
    pub linf: f64,
    pub linf_l2: f64,
    pub trace_inflow: f64,
    pub trace_outflow: f64,
    pub trace_wall: f64,
}

impl NormReport {
    pub fn of(grid: &Grid, field: &str, f: &ScalarField, p: f64) -> Self {
        let traces = BoundaryField::from_fn(grid, |_, n, _| f[n]);
        let trace = |patch| trace_lp(grid, &traces, 2.0, Some(patch));
        Self {
            field: field.to_string(),
            p,
            l2: lp(grid, f, 2.0),
            lp: lp(grid, f, p),
            w12: w1p(grid, f, 2.0),
            w1p: w1p(grid, f, p),
            w2p: w2p(grid, f, p),
            linf: lp(grid, f, f64::INFINITY),
            linf_l2: sup_slice_l2(grid, f),
            trace_inflow: trace(Patch::Inflow),
            trace_outflow: trace(Patch::Outflow),
            trace_wall: trace(Patch::Wall),
        }
    }

    /// Hölder on the discrete measure: `‖f‖_{L₂} ≤ |Ω|^{1/2−1/p}‖f‖_{L_p}`.
    pub fn holder_consistent(&self, grid: &Grid) -> bool {
        let bound = grid.domain().volume().powf(0.5 - 1.0 / self.p) * self.lp;
        self.l2 <= bound * (1.0 + 1e-12) + 1e-300
    }
}
