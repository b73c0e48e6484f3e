//! Grid-sampled scalar, vector and boundary fields.

use std::ops::{Index, IndexMut};

use crate::grid::{Face, Grid, Patch};

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField(Vec<f64>);

impl ScalarField {
    pub fn zeros(grid: &Grid) -> Self {
        Self(vec![0.0; grid.n_nodes()])
    }

    pub fn constant(grid: &Grid, value: f64) -> Self {
        Self(vec![value; grid.n_nodes()])
    }

    pub fn from_values(values: Vec<f64>) -> Self {
        Self(values)
    }

    /// Samples `f(node, x)` at every node.
    pub fn from_fn(grid: &Grid, mut f: impl FnMut(usize, [f64; 3]) -> f64) -> Self {
        Self((0..grid.n_nodes()).map(|n| f(n, grid.coords(n))).collect())
    }

    /// Multilinear interpolation at `x`, clamped to the closed channel.
    pub fn interpolate(&self, grid: &Grid, x: [f64; 3]) -> f64 {
        let d = grid.dim();
        let mut base = [0usize; 3];
        let mut t = [0.0; 3];
        for a in 0..d {
            let q = (x[a] / grid.h(a)).clamp(0.0, grid.cells(a) as f64);
            let i = (q.floor() as usize).min(grid.cells(a) - 1);
            base[a] = i;
            t[a] = q - i as f64;
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << d) {
            let mut w = 1.0;
            let mut idx = base;
            for a in 0..d {
                if corner >> a & 1 == 1 {
                    idx[a] += 1;
                    w *= t[a];
                } else {
                    w *= 1.0 - t[a];
                }
            }
            if w != 0.0 {
                acc += w * self.0[grid.index(idx)];
            }
        }
        acc
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self(self.0.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|v| s * v)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a - b)
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: f64, other: &Self) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += s * b;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Trapezoidal integral over the domain.
    pub fn integral(&self, grid: &Grid) -> f64 {
        self.0.iter().enumerate().map(|(n, v)| grid.volume_weight(n) * v).sum()
    }

    pub fn mean(&self, grid: &Grid) -> f64 {
        self.integral(grid) / grid.domain().volume()
    }

    /// Values restricted to the nodes of a face (face-local order).
    pub fn trace(&self, grid: &Grid, face: Face) -> Vec<f64> {
        grid.face_nodes(face).iter().map(|&n| self.0[n]).collect()
    }
}

impl Index<usize> for ScalarField {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for ScalarField {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

/// Vector field stored as one scalar field per Cartesian component.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField(Vec<ScalarField>);

impl VectorField {
    pub fn zeros(grid: &Grid) -> Self {
        Self((0..grid.dim()).map(|_| ScalarField::zeros(grid)).collect())
    }

    pub fn from_components(comps: Vec<ScalarField>) -> Self {
        Self(comps)
    }

    pub fn from_fn(grid: &Grid, mut f: impl FnMut(usize, [f64; 3]) -> Vec<f64>) -> Self {
        let d = grid.dim();
        let mut comps: Vec<Vec<f64>> = vec![Vec::with_capacity(grid.n_nodes()); d];
        for n in 0..grid.n_nodes() {
            let v = f(n, grid.coords(n));
            for c in 0..d {
                comps[c].push(v[c]);
            }
        }
        Self(comps.into_iter().map(ScalarField).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.0
    }

    pub fn components_mut(&mut self) -> &mut [ScalarField] {
        &mut self.0
    }

    pub fn at(&self, node: usize) -> [f64; 3] {
        let mut v = [0.0; 3];
        for (c, f) in self.0.iter().enumerate() {
            v[c] = f[node];
        }
        v
    }

    pub fn interpolate(&self, grid: &Grid, x: [f64; 3]) -> [f64; 3] {
        let mut v = [0.0; 3];
        for (c, f) in self.0.iter().enumerate() {
            v[c] = f.interpolate(grid, x);
        }
        v
    }

    pub fn map_components(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self(self.0.iter().map(f).collect())
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map_components(|c| c.scaled(s))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a.add(b)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a.sub(b)).collect())
    }

    pub fn axpy(&mut self, s: f64, other: &Self) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            a.axpy(s, b);
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.max_abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(ScalarField::is_finite)
    }
}

impl Index<usize> for VectorField {
    type Output = ScalarField;
    fn index(&self, c: usize) -> &ScalarField {
        &self.0[c]
    }
}

impl IndexMut<usize> for VectorField {
    fn index_mut(&mut self, c: usize) -> &mut ScalarField {
        &mut self.0[c]
    }
}

/// Values sampled on the boundary, stored face by face (face-local order).
///
/// Edge and corner nodes appear on every face they touch, so each face
/// carries its own datum there; quadrature is per face.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryField(Vec<Vec<f64>>);

impl BoundaryField {
    pub fn zeros(grid: &Grid) -> Self {
        Self(grid.faces().map(|f| vec![0.0; grid.face_nodes(f).len()]).collect())
    }

    pub fn from_fn(grid: &Grid, mut f: impl FnMut(Face, usize, [f64; 3]) -> f64) -> Self {
        Self(
            grid.faces()
                .map(|face| grid.face_nodes(face).iter().map(|&n| f(face, n, grid.coords(n))).collect())
                .collect(),
        )
    }

    /// Datum supported on a single patch, zero elsewhere.
    pub fn on_patch(grid: &Grid, patch: Patch, mut f: impl FnMut([f64; 3]) -> f64) -> Self {
        Self::from_fn(grid, |face, _, x| if face.patch() == patch { f(x) } else { 0.0 })
    }

    pub fn face(&self, face: Face) -> &[f64] {
        &self.0[face.id()]
    }

    pub fn face_mut(&mut self, face: Face) -> &mut [f64] {
        &mut self.0[face.id()]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self(self.0.iter().map(|v| v.iter().map(|&x| f(x)).collect()).collect())
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect())
                .collect(),
        )
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|v| s * v)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Trapezoidal integral over one patch.
    pub fn patch_integral(&self, grid: &Grid, patch: Patch) -> f64 {
        grid.faces()
            .filter(|f| f.patch() == patch)
            .map(|f| grid.face_weights(f).iter().zip(self.face(f)).map(|(w, v)| w * v).sum::<f64>())
            .sum()
    }

    pub fn integral(&self, grid: &Grid) -> f64 {
        Patch::ALL.iter().map(|&p| self.patch_integral(grid, p)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::ChannelDomain;

    #[test]
    fn trapezoid_integrals() {
        let g = Grid::build(ChannelDomain::new(2.0, 2).unwrap(), &[8, 4]).unwrap();
        let f = ScalarField::from_fn(&g, |_, x| x[0] + x[1]);
        // ∫∫ (x + y) = 2*1*(1) + 2*0.5 = 3
        assert!((f.integral(&g) - 3.0).abs() < 1e-12);
        let b = BoundaryField::from_fn(&g, |_, _, _| 1.0);
        assert!((b.integral(&g) - 6.0).abs() < 1e-12);
        assert!((b.patch_integral(&g, Patch::Wall) - 4.0).abs() < 1e-12);
    }
}
