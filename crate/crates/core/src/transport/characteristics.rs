use rayon::prelude::*;

use super::TransportProblem;
use crate::error::{NsfError, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::{Face, Grid};

/// Inverse-lookup tolerance on the cross-sectional position.
pub const INVERSE_TOL: f64 = 1e-10;
/// Largest admissible wall excursion of a trajectory.
pub const ESCAPE_TOL: f64 = 1e-8;

/// Source of the perturbation velocity `U` at arbitrary points.
pub trait VelocitySampler: Sync {
    fn sample(&self, x: [f64; 3]) -> [f64; 3];
}

/// Multilinear interpolation of a grid field.
pub struct GridVelocity<'a> {
    pub grid: &'a Grid,
    pub field: &'a VectorField,
}

impl VelocitySampler for GridVelocity<'_> {
    fn sample(&self, x: [f64; 3]) -> [f64; 3] {
        self.field.interpolate(self.grid, x)
    }
}

/// Closed-form velocity.
pub struct FnVelocity<F>(pub F);

impl<F: Fn([f64; 3]) -> [f64; 3] + Sync> VelocitySampler for FnVelocity<F> {
    fn sample(&self, x: [f64; 3]) -> [f64; 3] {
        (self.0)(x)
    }
}

/// RK4 polyline `s ↦ ψ(s, z)` with the tangent `ũ(ψ)` stored at every vertex.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub start: [f64; 3],
    pub points: Vec<[f64; 3]>,
    pub tangents: Vec<[f64; 3]>,
}

#[derive(Debug, Clone)]
pub struct CharacteristicMap {
    pub ds: f64,
    pub trajectories: Vec<Trajectory>,
}

/// Default step `min(h₁, h₂)/2`.
pub fn default_step(grid: &Grid) -> f64 {
    0.5 * grid.h(0).min(grid.min_cross_spacing())
}

fn tilde(sampler: &dyn VelocitySampler, x: [f64; 3]) -> [f64; 3] {
    let u = sampler.sample(x);
    [1.0 + u[0], u[1], u[2]]
}

fn axpy(x: [f64; 3], s: f64, v: [f64; 3]) -> [f64; 3] {
    [x[0] + s * v[0], x[1] + s * v[1], x[2] + s * v[2]]
}

fn trace(sampler: &dyn VelocitySampler, grid: &Grid, start: [f64; 3], ds: f64) -> Result<Trajectory> {
    let l = grid.domain().length();
    let d = grid.dim();
    let mut x = start;
    let mut k1 = tilde(sampler, x);
    let mut traj = Trajectory { start, points: vec![x], tangents: vec![k1] };
    let mut s = 0.0;
    // the axial speed is at least 1/2, so this bounds the step count generously
    let max_steps = (4.0 * l / ds).ceil() as usize + 8;
    while x[0] < l {
        if traj.points.len() > max_steps {
            return Err(NsfError::TransportPrecondition(format!("trajectory from {start:?} stalls before Γ_out")));
        }
        let k2 = tilde(sampler, axpy(x, 0.5 * ds, k1));
        let k3 = tilde(sampler, axpy(x, 0.5 * ds, k2));
        let k4 = tilde(sampler, axpy(x, ds, k3));
        let mut next = x;
        for a in 0..3 {
            next[a] += ds / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
        }
        s += ds;
        for a in 1..d {
            let top = grid.domain().extent(a);
            let excursion = (-next[a]).max(next[a] - top);
            if excursion > ESCAPE_TOL {
                return Err(NsfError::TrajectoryEscape { s, excursion });
            }
            next[a] = next[a].clamp(0.0, top);
        }
        x = next;
        k1 = tilde(sampler, x);
        traj.points.push(x);
        traj.tangents.push(k1);
    }
    Ok(traj)
}

/// Traces one trajectory from every Γ_in node until it reaches `x₁ = l`.
pub fn build_characteristics(sampler: &dyn VelocitySampler, grid: &Grid, ds: f64) -> Result<CharacteristicMap> {
    if !(ds > 0.0 && ds.is_finite()) {
        return Err(NsfError::InvalidParameter(format!("step size must be positive, got {ds}")));
    }
    let starts: Vec<[f64; 3]> = grid.face_nodes(Face::INFLOW).iter().map(|&n| grid.coords(n)).collect();
    let trajectories = starts.into_par_iter().map(|z| trace(sampler, grid, z, ds)).collect::<Result<Vec<_>>>()?;
    Ok(CharacteristicMap { ds, trajectories })
}

fn hermite(p0: f64, p1: f64, m0: f64, m1: f64, ds: f64, t: f64) -> (f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    let value = (2.0 * t3 - 3.0 * t2 + 1.0) * p0
        + (t3 - 2.0 * t2 + t) * ds * m0
        + (-2.0 * t3 + 3.0 * t2) * p1
        + (t3 - t2) * ds * m1;
    let slope = (6.0 * t2 - 6.0 * t) * p0
        + (3.0 * t2 - 4.0 * t + 1.0) * ds * m0
        + (-6.0 * t2 + 6.0 * t) * p1
        + (3.0 * t2 - 2.0 * t) * ds * m1;
    (value, slope)
}

/// Crossing of `x₁ = x1`: vertex index `k`, fraction `t` of the step and the point.
fn crossing(traj: &Trajectory, ds: f64, x1: f64) -> (usize, f64, [f64; 3]) {
    let pts = &traj.points;
    if x1 <= pts[0][0] {
        return (0, 0.0, pts[0]);
    }
    let k = pts.iter().position(|p| p[0] > x1).map_or(pts.len() - 2, |j| j - 1);
    let (p0, p1) = (pts[k], pts[k + 1]);
    let (m0, m1) = (traj.tangents[k], traj.tangents[k + 1]);
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut t = ((x1 - p0[0]) / (p1[0] - p0[0])).clamp(0.0, 1.0);
    for _ in 0..60 {
        let (v, dv) = hermite(p0[0], p1[0], m0[0], m1[0], ds, t);
        let f = v - x1;
        if f.abs() <= 1e-15 * (1.0 + x1.abs()) {
            break;
        }
        if f > 0.0 {
            hi = t;
        } else {
            lo = t;
        }
        let newton = t - f / dv;
        t = if dv > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
    }
    let mut point = [x1, 0.0, 0.0];
    for a in 1..3 {
        point[a] = hermite(p0[a], p1[a], m0[a], m1[a], ds, t).0;
    }
    (k, t, point)
}

/// Cubic Lagrange weights and their derivatives at `t ∈ [0, 3]` for nodes `0..4`.
fn cubic_weights(t: f64) -> ([f64; 4], [f64; 4]) {
    let mut w = [0.0; 4];
    let mut dw = [0.0; 4];
    for j in 0..4 {
        let others: Vec<f64> = (0..4).filter(|&m| m != j).map(|m| m as f64).collect();
        let denom: f64 = others.iter().map(|&m| j as f64 - m).product();
        let f: Vec<f64> = others.iter().map(|&m| t - m).collect();
        w[j] = f[0] * f[1] * f[2] / denom;
        dw[j] = (f[1] * f[2] + f[0] * f[2] + f[0] * f[1]) / denom;
    }
    (w, dw)
}

/// Tensor-product cubic interpolation over the Γ_in node lattice at cross
/// position `z`; returns the value and its gradient in `z`.
fn lattice_interp(grid: &Grid, values: &[f64], z: [f64; 3]) -> (f64, [f64; 3]) {
    let d = grid.dim();
    let mut base = [0usize; 3];
    let mut w = [[1.0, 0.0, 0.0, 0.0]; 3];
    let mut dw = [[0.0; 4]; 3];
    let mut span = [1usize; 3];
    for a in 1..d {
        let q = (z[a] / grid.h(a)).clamp(0.0, grid.cells(a) as f64);
        let i = (q.floor() as usize).saturating_sub(1).min(grid.cells(a) - 3);
        base[a] = i;
        let (wa, dwa) = cubic_weights(q - i as f64);
        w[a] = wa;
        dw[a] = dwa.map(|v| v / grid.h(a));
        span[a] = 4;
    }
    let mut value = 0.0;
    let mut grad = [0.0; 3];
    for j1 in 0..span[1] {
        for j2 in 0..span[2] {
            let v = values[grid.index([0, base[1] + j1, base[2] + j2])];
            value += w[1][j1] * w[2][j2] * v;
            grad[1] += dw[1][j1] * w[2][j2] * v;
            grad[2] += w[1][j1] * dw[2][j2] * v;
        }
    }
    (value, grad)
}

/// Newton solve of `Y(z) = target` where `Y` interpolates the crossing
/// positions; returns `None` if it does not converge.
fn invert(grid: &Grid, crossings: &[Vec<f64>], target: [f64; 3]) -> Option<[f64; 3]> {
    let d = grid.dim();
    let mut z = target;
    for _ in 0..50 {
        let mut res = [0.0; 3];
        let mut jac = [[0.0; 3]; 3];
        for a in 1..d {
            let (v, g) = lattice_interp(grid, &crossings[a], z);
            res[a] = v - target[a];
            jac[a] = g;
        }
        if (1..d).all(|a| res[a].abs() <= INVERSE_TOL) {
            return Some(z);
        }
        let step = match d {
            2 => [0.0, res[1] / jac[1][1], 0.0],
            _ => {
                let det = jac[1][1] * jac[2][2] - jac[1][2] * jac[2][1];
                if det == 0.0 {
                    return None;
                }
                [
                    0.0,
                    (res[1] * jac[2][2] - res[2] * jac[1][2]) / det,
                    (jac[1][1] * res[2] - jac[2][1] * res[1]) / det,
                ]
            }
        };
        if !step.iter().all(|v| v.is_finite()) {
            return None;
        }
        for a in 1..d {
            z[a] = (z[a] - step[a]).clamp(0.0, grid.domain().extent(a));
        }
    }
    None
}

/// `w(x) = e^{−γs}(w_in(z) + ∫₀^s e^{γs'} h(ψ(s', z)) ds')` with `(s, z) = φ(x)`,
/// trapezoid rule along each trajectory, evaluated on every grid node.
pub fn apply_s_characteristic(p: &TransportProblem, grid: &Grid, map: &CharacteristicMap) -> Result<ScalarField> {
    p.validate(grid)?;
    if map.trajectories.len() != p.inflow.len() {
        return Err(NsfError::InvalidParameter("characteristic map built for another grid".into()));
    }
    let gamma = p.damping;
    let ds = map.ds;
    let weighted = |x: [f64; 3], s: f64| (gamma * s).exp() * p.source.interpolate(grid, x);
    let profiles: Vec<(Vec<f64>, Vec<f64>)> = map
        .trajectories
        .par_iter()
        .map(|traj| {
            let hv: Vec<f64> = traj.points.iter().enumerate().map(|(k, &x)| weighted(x, k as f64 * ds)).collect();
            let mut acc = vec![0.0; hv.len()];
            for k in 1..hv.len() {
                acc[k] = acc[k - 1] + 0.5 * ds * (hv[k - 1] + hv[k]);
            }
            (hv, acc)
        })
        .collect();
    let d = grid.dim();
    let stride = grid.stride(0);
    let slices: Vec<(Vec<f64>, Vec<usize>)> = (0..grid.nodes_along(0))
        .into_par_iter()
        .map(|i0| {
            let x1 = i0 as f64 * grid.h(0);
            let mut crossings = vec![vec![0.0; stride]; d];
            let mut values = vec![0.0; stride];
            for (k, traj) in map.trajectories.iter().enumerate() {
                let (j, t, pt) = crossing(traj, ds, x1);
                let s = (j as f64 + t) * ds;
                let (hv, acc) = &profiles[k];
                let integral = acc[j] + 0.5 * t * ds * (hv[j] + weighted(pt, s));
                for a in 1..d {
                    crossings[a][k] = pt[a];
                }
                values[k] = (-gamma * s).exp() * (p.inflow[k] + integral);
            }
            let mut out = vec![f64::NAN; stride];
            let mut failed = Vec::new();
            for (j, n) in grid.slice_nodes(i0).enumerate() {
                match invert(grid, &crossings, grid.coords(n)) {
                    Some(z) => out[j] = lattice_interp(grid, &values, z).0,
                    None => failed.push(n),
                }
            }
            (out, failed)
        })
        .collect();
    let failed: Vec<usize> = slices.iter().flat_map(|(_, f)| f.iter().copied()).collect();
    if !failed.is_empty() {
        return Err(NsfError::InverseLookup { nodes: failed });
    }
    Ok(ScalarField::from_values(slices.into_iter().flat_map(|(v, _)| v).collect()))
}
