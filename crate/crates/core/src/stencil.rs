//! Finite-difference stencils with boundary rules applied through an implicit
//! ghost layer.
//!
//! Every derivative is produced as an affine combination of node values, so
//! the same code assembles matrices and evaluates residuals. A face rule
//! prescribes the outward normal derivative `f_n` at the face nodes:
//!
//! * `Robin { beta, flux }`: `f_n = flux - beta f` (Neumann when `beta = 0`);
//! * `OneSided`: `f_n` from the second-order one-sided difference
//!   `(3 f0 - 4 f1 + f2) / 2h`. Used for Dirichlet components and for fields
//!   without a boundary condition.
//!
//! A second derivative at a face node uses the ghost value eliminated with
//! `f_n`: `D_aa f = (2 f1 - 2 f0 + 2 h f_n) / h²`.

use crate::field::{BoundaryField, ScalarField, VectorField};
use crate::grid::{Face, Grid};

/// Affine combination `Σ c_k f[n_k] + constant`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Affine {
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

impl Affine {
    pub fn node(n: usize) -> Self {
        Self { terms: vec![(n, 1.0)], constant: 0.0 }
    }

    pub fn constant(c: f64) -> Self {
        Self { terms: Vec::new(), constant: c }
    }

    pub fn add_scaled(&mut self, other: &Affine, s: f64) {
        if s == 0.0 {
            return;
        }
        self.terms.extend(other.terms.iter().map(|&(n, c)| (n, s * c)));
        self.constant += s * other.constant;
    }

    pub fn scaled(mut self, s: f64) -> Self {
        for t in &mut self.terms {
            t.1 *= s;
        }
        self.constant *= s;
        self
    }

    pub fn eval(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(n, c)| c * values[n]).sum::<f64>() + self.constant
    }

    /// Linear part only.
    pub fn eval_linear(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(n, c)| c * values[n]).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FaceRule {
    Robin { beta: f64, flux: Vec<f64> },
    OneSided,
}

/// Boundary rules of one scalar field, one per face.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarBc {
    rules: Vec<FaceRule>,
}

impl ScalarBc {
    /// No boundary condition: one-sided derivatives on every face.
    pub fn free(grid: &Grid) -> Self {
        Self { rules: vec![FaceRule::OneSided; grid.n_faces()] }
    }

    pub fn neumann(grid: &Grid, flux: &BoundaryField) -> Self {
        Self::robin(grid, &vec![0.0; grid.n_faces()], flux)
    }

    pub fn homogeneous_neumann(grid: &Grid) -> Self {
        Self::neumann(grid, &BoundaryField::zeros(grid))
    }

    /// `f_n = flux - beta[face] f` on every face.
    pub fn robin(grid: &Grid, beta: &[f64], flux: &BoundaryField) -> Self {
        Self {
            rules: grid
                .faces()
                .map(|f| FaceRule::Robin { beta: beta[f.id()], flux: flux.face(f).to_vec() })
                .collect(),
        }
    }

    pub fn set(&mut self, face: Face, rule: FaceRule) {
        self.rules[face.id()] = rule;
    }

    pub fn rule(&self, face: Face) -> &FaceRule {
        &self.rules[face.id()]
    }
}

/// Stencil factory bound to a grid.
#[derive(Debug, Clone, Copy)]
pub struct Stencils<'g> {
    grid: &'g Grid,
}

fn face_on_axis(grid: &Grid, node: usize, axis: usize) -> Option<Face> {
    grid.faces_of(node).find(|f| f.axis == axis)
}

fn inward(grid: &Grid, face: Face, node: usize, steps: isize) -> usize {
    let dir = -(face.outward_sign() as isize);
    grid.neighbor(node, face.axis, dir * steps).expect("at least four cells per axis")
}

impl<'g> Stencils<'g> {
    pub fn new(grid: &'g Grid) -> Self {
        Self { grid }
    }

    pub fn grid(&self) -> &'g Grid {
        self.grid
    }

    /// Outward normal derivative at a node on `face`.
    pub fn normal_flux(&self, bc: &ScalarBc, node: usize, face: Face) -> Affine {
        match bc.rule(face) {
            FaceRule::Robin { beta, flux } => {
                let pos = self.grid.face_position(face, node).expect("node on face");
                Affine { terms: vec![(node, -beta)], constant: flux[pos] }
            }
            FaceRule::OneSided => self.one_sided_normal(node, face),
        }
    }

    pub fn one_sided_normal(&self, node: usize, face: Face) -> Affine {
        let h = self.grid.h(face.axis);
        let n1 = inward(self.grid, face, node, 1);
        let n2 = inward(self.grid, face, node, 2);
        Affine { terms: vec![(node, 1.5 / h), (n1, -2.0 / h), (n2, 0.5 / h)], constant: 0.0 }
    }

    /// First derivative along `axis`.
    pub fn d1(&self, bc: &ScalarBc, node: usize, axis: usize) -> Affine {
        match face_on_axis(self.grid, node, axis) {
            Some(face) => self.normal_flux(bc, node, face).scaled(face.outward_sign()),
            None => {
                let h = self.grid.h(axis);
                let s = self.grid.stride(axis);
                Affine { terms: vec![(node + s, 0.5 / h), (node - s, -0.5 / h)], constant: 0.0 }
            }
        }
    }

    /// Second derivative `∂_a ∂_b`.
    pub fn d2(&self, bc: &ScalarBc, node: usize, a: usize, b: usize) -> Affine {
        if a == b {
            return self.d2_pure(bc, node, a);
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let on_lo = face_on_axis(self.grid, node, lo);
        let on_hi = face_on_axis(self.grid, node, hi);
        match (on_lo, on_hi) {
            (Some(f_lo), Some(_)) => self.one_sided_of_d1(bc, node, f_lo, hi),
            (Some(_), None) => self.centered_of_d1(bc, node, hi, lo),
            (None, Some(_)) => self.centered_of_d1(bc, node, lo, hi),
            (None, None) => self.centered_of_d1(bc, node, hi, lo),
        }
    }

    fn d2_pure(&self, bc: &ScalarBc, node: usize, a: usize) -> Affine {
        let h = self.grid.h(a);
        let h2 = h * h;
        match face_on_axis(self.grid, node, a) {
            Some(face) => {
                let n1 = inward(self.grid, face, node, 1);
                let mut st = Affine { terms: vec![(n1, 2.0 / h2), (node, -2.0 / h2)], constant: 0.0 };
                st.add_scaled(&self.normal_flux(bc, node, face), 2.0 / h);
                st
            }
            None => {
                let s = self.grid.stride(a);
                Affine { terms: vec![(node + s, 1.0 / h2), (node, -2.0 / h2), (node - s, 1.0 / h2)], constant: 0.0 }
            }
        }
    }

    /// Centered difference along `along` of the first derivative along `of`.
    fn centered_of_d1(&self, bc: &ScalarBc, node: usize, along: usize, of: usize) -> Affine {
        let h = self.grid.h(along);
        let s = self.grid.stride(along);
        let mut st = self.d1(bc, node + s, of).scaled(0.5 / h);
        st.add_scaled(&self.d1(bc, node - s, of), -0.5 / h);
        st
    }

    /// One-sided difference across `face` of the first derivative along `of`.
    fn one_sided_of_d1(&self, bc: &ScalarBc, node: usize, face: Face, of: usize) -> Affine {
        let h = self.grid.h(face.axis);
        let sign = face.outward_sign();
        let n1 = inward(self.grid, face, node, 1);
        let n2 = inward(self.grid, face, node, 2);
        let mut st = self.d1(bc, node, of).scaled(sign * 1.5 / h);
        st.add_scaled(&self.d1(bc, n1, of), -sign * 2.0 / h);
        st.add_scaled(&self.d1(bc, n2, of), sign * 0.5 / h);
        st
    }

    pub fn laplacian(&self, bc: &ScalarBc, node: usize) -> Affine {
        let mut st = Affine::default();
        for a in 0..self.grid.dim() {
            st.add_scaled(&self.d2_pure(bc, node, a), 1.0);
        }
        st
    }

    // Field-level evaluators.

    pub fn d1_field(&self, f: &ScalarField, bc: &ScalarBc, axis: usize) -> ScalarField {
        ScalarField::from_fn(self.grid, |n, _| self.d1(bc, n, axis).eval(f.values()))
    }

    pub fn d2_field(&self, f: &ScalarField, bc: &ScalarBc, a: usize, b: usize) -> ScalarField {
        ScalarField::from_fn(self.grid, |n, _| self.d2(bc, n, a, b).eval(f.values()))
    }

    pub fn laplacian_field(&self, f: &ScalarField, bc: &ScalarBc) -> ScalarField {
        ScalarField::from_fn(self.grid, |n, _| self.laplacian(bc, n).eval(f.values()))
    }

    pub fn gradient(&self, f: &ScalarField, bc: &ScalarBc) -> VectorField {
        VectorField::from_components((0..self.grid.dim()).map(|a| self.d1_field(f, bc, a)).collect())
    }

    /// Jacobian `J[c][a] = ∂_a v_c`.
    pub fn jacobian(&self, v: &VectorField, bcs: &[ScalarBc]) -> Vec<Vec<ScalarField>> {
        (0..self.grid.dim())
            .map(|c| (0..self.grid.dim()).map(|a| self.d1_field(&v[c], &bcs[c], a)).collect())
            .collect()
    }

    pub fn divergence(&self, v: &VectorField, bcs: &[ScalarBc]) -> ScalarField {
        let mut div = ScalarField::zeros(self.grid);
        for a in 0..self.grid.dim() {
            div = div.add(&self.d1_field(&v[a], &bcs[a], a));
        }
        div
    }

    /// `div S(∇v)_c = μΔv_c + (μ/3 + λ)∂_c div v`.
    pub fn stress_divergence(&self, v: &VectorField, bcs: &[ScalarBc], mu: f64, lambda: f64) -> VectorField {
        let d = self.grid.dim();
        let grad_div = mu / 3.0 + lambda;
        VectorField::from_components(
            (0..d)
                .map(|c| {
                    ScalarField::from_fn(self.grid, |n, _| {
                        let lap = self.laplacian(&bcs[c], n).eval(v[c].values());
                        let gd: f64 = (0..d).map(|b| self.d2(&bcs[b], n, c, b).eval(v[b].values())).sum();
                        mu * lap + grad_div * gd
                    })
                })
                .collect(),
        )
    }

    /// Upwind derivative along a cross-sectional axis, biased by the sign of `wind`.
    pub fn upwind(&self, node: usize, axis: usize, wind: f64) -> Affine {
        let h = self.grid.h(axis);
        let s = self.grid.stride(axis);
        let i = self.grid.multi_index(node)[axis];
        let last = self.grid.cells(axis);
        let backward = if i == 0 {
            false
        } else if i == last {
            true
        } else {
            wind >= 0.0
        };
        if backward {
            Affine { terms: vec![(node, 1.0 / h), (node - s, -1.0 / h)], constant: 0.0 }
        } else {
            Affine { terms: vec![(node + s, 1.0 / h), (node, -1.0 / h)], constant: 0.0 }
        }
    }
}

/// Boundary rules of a vector field whose normal component vanishes on
/// every face and whose tangential components obey the slip condition
/// `μ f_n(u_c) + α u_c = B_c` (the cross term drops since `u·n = 0`).
pub fn slip_bcs(grid: &Grid, mu: f64, alpha: &[f64], b: &[BoundaryField]) -> Vec<ScalarBc> {
    (0..grid.dim())
        .map(|c| {
            let mut bc = ScalarBc::free(grid);
            for face in grid.faces().filter(|f| f.axis != c) {
                let flux = b[c].face(face).iter().map(|v| v / mu).collect();
                bc.set(face, FaceRule::Robin { beta: alpha[face.id()] / mu, flux });
            }
            bc
        })
        .collect()
}

/// Derivative along `axis` of face data, second order, one-sided at the
/// edges of the face.
pub fn tangential_d1(grid: &Grid, face: Face, values: &[f64], axis: usize) -> Vec<f64> {
    debug_assert_ne!(axis, face.axis);
    let h = grid.h(axis);
    let last = grid.cells(axis);
    grid.face_nodes(face)
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let at = |off: isize| {
                let m = grid.neighbor(n, axis, off).expect("neighbor on face");
                values[grid.face_position(face, m).expect("same face")]
            };
            match grid.multi_index(n)[axis] {
                0 => (-3.0 * values[k] + 4.0 * at(1) - at(2)) / (2.0 * h),
                i if i == last => (3.0 * values[k] - 4.0 * at(-1) + at(-2)) / (2.0 * h),
                _ => (at(1) - at(-1)) / (2.0 * h),
            }
        })
        .collect()
}

pub fn free_bcs(grid: &Grid) -> Vec<ScalarBc> {
    (0..grid.dim()).map(|_| ScalarBc::free(grid)).collect()
}
