//! Channel domain, tensor grid, boundary faces and the reflection operators
//! used across the inflow/outflow planes.
//!
//! The channel is `[0, l] x [0,1]^(d-1)`; axis 0 is the flow direction. Nodes
//! sit on a uniform collocated lattice including the boundary. A single ghost
//! layer is implied by the boundary rules of the solvers; it is never stored
//! on the grid itself.

use serde::{Deserialize, Serialize};

use crate::error::{NsfError, Result};
use crate::field::{ScalarField, VectorField};

/// Width of the implicit ghost layer used by every boundary stencil.
pub const GHOST_WIDTH: usize = 1;

/// Smallest number of cells per axis for which every stencil is defined.
pub const MIN_RESOLUTION: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelDomain {
    length: f64,
    dim: usize,
}

impl ChannelDomain {
    pub fn new(length: f64, dim: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(NsfError::InvalidGrid(format!("channel length must be positive, got {length}")));
        }
        if dim != 2 && dim != 3 {
            return Err(NsfError::InvalidGrid(format!("dimension must be 2 or 3, got {dim}")));
        }
        Ok(Self { length, dim })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Extent of the domain along `axis` (the cross-section is the unit interval/square).
    pub fn extent(&self, axis: usize) -> f64 {
        if axis == 0 {
            self.length
        } else {
            1.0
        }
    }

    pub fn volume(&self) -> f64 {
        self.length
    }

    pub fn cross_section_measure(&self) -> f64 {
        1.0
    }

    /// Measure of a boundary patch; the wall is the lateral surface `∂Ω₀ × [0, l]`.
    pub fn patch_measure(&self, patch: Patch) -> f64 {
        match patch {
            Patch::Inflow | Patch::Outflow => self.cross_section_measure(),
            Patch::Wall => {
                let perimeter = if self.dim == 2 { 2.0 } else { 4.0 };
                perimeter * self.length
            }
        }
    }

    pub fn boundary_measure(&self) -> f64 {
        Patch::ALL.iter().map(|&p| self.patch_measure(p)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Low,
    High,
}

impl Side {
    /// Sign of the outward normal along the face axis.
    pub fn sign(self) -> f64 {
        match self {
            Side::Low => -1.0,
            Side::High => 1.0,
        }
    }
}

/// One planar face of the box, identified by its normal axis and side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Face {
    pub axis: usize,
    pub side: Side,
}

impl Face {
    pub fn new(axis: usize, side: Side) -> Self {
        Self { axis, side }
    }

    /// Dense face id in `0..2d`.
    pub fn id(self) -> usize {
        2 * self.axis + usize::from(self.side == Side::High)
    }

    pub fn from_id(id: usize) -> Self {
        let side = if id % 2 == 0 { Side::Low } else { Side::High };
        Self { axis: id / 2, side }
    }

    pub fn patch(self) -> Patch {
        match (self.axis, self.side) {
            (0, Side::Low) => Patch::Inflow,
            (0, Side::High) => Patch::Outflow,
            _ => Patch::Wall,
        }
    }

    pub fn outward_sign(self) -> f64 {
        self.side.sign()
    }

    pub const INFLOW: Face = Face { axis: 0, side: Side::Low };
    pub const OUTFLOW: Face = Face { axis: 0, side: Side::High };
}

/// Boundary patches of the channel: Γ_in, Γ_out and the lateral wall Γ₀.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Patch {
    Inflow,
    Outflow,
    Wall,
}

impl Patch {
    pub const ALL: [Patch; 3] = [Patch::Inflow, Patch::Outflow, Patch::Wall];

    fn priority(self) -> u8 {
        match self {
            Patch::Inflow => 0,
            Patch::Outflow => 1,
            Patch::Wall => 2,
        }
    }
}

/// Serializable grid header written into run outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDescription {
    pub l: f64,
    pub d: usize,
    pub resolution: Vec<usize>,
    pub h: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    domain: ChannelDomain,
    cells: [usize; 3],
    nodes: [usize; 3],
    spacing: [f64; 3],
    strides: [usize; 3],
    face_nodes: Vec<Vec<usize>>,
}

impl Grid {
    /// Builds the uniform grid; `resolution` holds the cell count per axis.
    pub fn build(domain: ChannelDomain, resolution: &[usize]) -> Result<Self> {
        let d = domain.dim();
        if resolution.len() != d {
            return Err(NsfError::InvalidGrid(format!(
                "expected {d} resolution entries, got {}",
                resolution.len()
            )));
        }
        if let Some(&n) = resolution.iter().find(|&&n| n < MIN_RESOLUTION) {
            return Err(NsfError::InvalidGrid(format!(
                "resolution {n} below the minimum of {MIN_RESOLUTION} cells per axis"
            )));
        }
        let mut cells = [0; 3];
        let mut nodes = [1; 3];
        let mut spacing = [0.0; 3];
        for a in 0..d {
            cells[a] = resolution[a];
            nodes[a] = resolution[a] + 1;
            spacing[a] = domain.extent(a) / resolution[a] as f64;
        }
        let strides = [nodes[1] * nodes[2], nodes[2], 1];
        let mut grid = Self { domain, cells, nodes, spacing, strides, face_nodes: Vec::new() };
        grid.face_nodes = (0..2 * d).map(|id| grid.collect_face_nodes(Face::from_id(id))).collect();
        Ok(grid)
    }

    fn collect_face_nodes(&self, face: Face) -> Vec<usize> {
        let fixed = match face.side {
            Side::Low => 0,
            Side::High => self.cells[face.axis],
        };
        (0..self.n_nodes())
            .filter(|&n| self.multi_index(n)[face.axis] == fixed)
            .collect()
    }

    pub fn domain(&self) -> &ChannelDomain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn cells(&self, axis: usize) -> usize {
        self.cells[axis]
    }

    pub fn nodes_along(&self, axis: usize) -> usize {
        self.nodes[axis]
    }

    pub fn h(&self, axis: usize) -> f64 {
        self.spacing[axis]
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes[0] * self.nodes[1] * self.nodes[2]
    }

    /// Smallest spacing over the cross-section axes.
    pub fn min_cross_spacing(&self) -> f64 {
        (1..self.dim()).map(|a| self.h(a)).fold(f64::INFINITY, f64::min)
    }

    pub fn index(&self, i: [usize; 3]) -> usize {
        i[0] * self.strides[0] + i[1] * self.strides[1] + i[2]
    }

    pub fn multi_index(&self, node: usize) -> [usize; 3] {
        let i0 = node / self.strides[0];
        let rem = node % self.strides[0];
        [i0, rem / self.strides[1], rem % self.strides[1]]
    }

    pub fn coords(&self, node: usize) -> [f64; 3] {
        let i = self.multi_index(node);
        let mut x = [0.0; 3];
        for a in 0..self.dim() {
            x[a] = i[a] as f64 * self.spacing[a];
        }
        x
    }

    /// Neighbour `offset` steps along `axis`, if it lies on the grid.
    pub fn neighbor(&self, node: usize, axis: usize, offset: isize) -> Option<usize> {
        let i = self.multi_index(node)[axis] as isize + offset;
        if i < 0 || i > self.cells[axis] as isize {
            None
        } else {
            Some((node as isize + offset * self.strides[axis] as isize) as usize)
        }
    }

    pub fn faces(&self) -> impl Iterator<Item = Face> {
        (0..2 * self.dim()).map(Face::from_id)
    }

    pub fn n_faces(&self) -> usize {
        2 * self.dim()
    }

    pub fn face_nodes(&self, face: Face) -> &[usize] {
        &self.face_nodes[face.id()]
    }

    /// Faces a node lies on (empty for interior nodes).
    pub fn faces_of(&self, node: usize) -> impl Iterator<Item = Face> + '_ {
        let i = self.multi_index(node);
        (0..self.dim()).filter_map(move |a| {
            if i[a] == 0 {
                Some(Face::new(a, Side::Low))
            } else if i[a] == self.cells[a] {
                Some(Face::new(a, Side::High))
            } else {
                None
            }
        })
    }

    pub fn on_face(&self, node: usize, face: Face) -> bool {
        let i = self.multi_index(node)[face.axis];
        match face.side {
            Side::Low => i == 0,
            Side::High => i == self.cells[face.axis],
        }
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.faces_of(node).next().is_some()
    }

    /// Position of a node inside the face-local ordering of `face`.
    pub fn face_position(&self, face: Face, node: usize) -> Option<usize> {
        self.face_nodes(face).binary_search(&node).ok()
    }

    /// Patch a boundary node is assigned to (priority Γ_in > Γ_out > Γ₀).
    pub fn patch_of(&self, node: usize) -> Option<Patch> {
        self.faces_of(node).map(Face::patch).min_by_key(|p| p.priority())
    }

    /// Boundary nodes assigned to `patch` after tie-breaking.
    pub fn patch_nodes(&self, patch: Patch) -> Vec<usize> {
        (0..self.n_nodes()).filter(|&n| self.patch_of(n) == Some(patch)).collect()
    }

    /// Trapezoidal quadrature weight of a node (includes the cell volume).
    pub fn volume_weight(&self, node: usize) -> f64 {
        let i = self.multi_index(node);
        let mut w = 1.0;
        for a in 0..self.dim() {
            let half = i[a] == 0 || i[a] == self.cells[a];
            w *= if half { 0.5 * self.spacing[a] } else { self.spacing[a] };
        }
        w
    }

    /// Trapezoidal weights over a face, in face-local order.
    pub fn face_weights(&self, face: Face) -> Vec<f64> {
        self.face_nodes(face)
            .iter()
            .map(|&n| {
                let i = self.multi_index(n);
                let mut w = 1.0;
                for a in (0..self.dim()).filter(|&a| a != face.axis) {
                    let half = i[a] == 0 || i[a] == self.cells[a];
                    w *= if half { 0.5 * self.spacing[a] } else { self.spacing[a] };
                }
                w
            })
            .collect()
    }

    /// Trapezoidal weights over one cross-sectional slice `x₁ = i₀ h₁`.
    pub fn slice_weights(&self) -> Vec<f64> {
        self.face_weights(Face::INFLOW)
    }

    pub fn slice_nodes(&self, i0: usize) -> impl Iterator<Item = usize> + '_ {
        let start = i0 * self.strides[0];
        start..start + self.strides[0]
    }

    pub fn describe(&self) -> GridDescription {
        let d = self.dim();
        GridDescription {
            l: self.domain.length(),
            d,
            resolution: self.cells[..d].to_vec(),
            h: self.spacing[..d].to_vec(),
        }
    }

    /// Grid of the channel doubled across Γ_out (`[0, 2l]`, twice the axial cells).
    pub fn doubled_across_outflow(&self) -> Result<Grid> {
        let domain = ChannelDomain::new(2.0 * self.domain.length(), self.dim())?;
        let mut res: Vec<usize> = self.cells[..self.dim()].to_vec();
        res[0] *= 2;
        Grid::build(domain, &res)
    }

    /// Node of `self` obtained by mirroring `node` of the doubled grid back across `x₁ = l`.
    pub fn fold_from_doubled(&self, doubled: &Grid, node: usize) -> usize {
        let mut i = doubled.multi_index(node);
        let n0 = self.cells[0];
        if i[0] > n0 {
            i[0] = 2 * n0 - i[0];
        }
        self.index(i)
    }
}

fn check_reflect_patch(patch: Patch) -> Result<Face> {
    match patch {
        Patch::Inflow => Ok(Face::INFLOW),
        Patch::Outflow => Ok(Face::OUTFLOW),
        Patch::Wall => Err(NsfError::PatchNotAllowed(patch)),
    }
}

/// Ghost layer values of a field across one face, in face-local order.
#[derive(Debug, Clone, PartialEq)]
pub struct GhostLayer {
    pub face: Face,
    pub values: Vec<f64>,
}

fn inward(grid: &Grid, face: Face, node: usize, steps: isize) -> usize {
    let dir = -(face.outward_sign() as isize);
    grid.neighbor(node, face.axis, dir * steps).expect("grid has at least four cells per axis")
}

/// Symmetric (even) reflection across Γ_in or Γ_out: ghost(x̃) = f(x).
pub fn extend_symmetric(grid: &Grid, field: &ScalarField, across: Patch) -> Result<GhostLayer> {
    let face = check_reflect_patch(across)?;
    let values = grid
        .face_nodes(face)
        .iter()
        .map(|&n| field[inward(grid, face, n, 1)])
        .collect();
    Ok(GhostLayer { face, values })
}

/// Antisymmetric reflection of a vector field: the axial component is odd,
/// the cross-sectional components are even.
pub fn extend_antisymmetric(grid: &Grid, field: &VectorField, across: Patch) -> Result<Vec<GhostLayer>> {
    let face = check_reflect_patch(across)?;
    Ok((0..grid.dim())
        .map(|c| {
            let sign = if c == 0 { -1.0 } else { 1.0 };
            let values = grid
                .face_nodes(face)
                .iter()
                .map(|&n| sign * field[c][inward(grid, face, n, 1)])
                .collect();
            GhostLayer { face, values }
        })
        .collect())
}

/// Centered normal difference at the face nodes using a ghost layer.
pub fn centered_normal_difference(grid: &Grid, field: &ScalarField, ghost: &GhostLayer) -> Vec<f64> {
    let face = ghost.face;
    let h = grid.h(face.axis);
    grid.face_nodes(face)
        .iter()
        .zip(&ghost.values)
        .map(|(&n, &g)| face.outward_sign() * (g - field[inward(grid, face, n, 1)]) / (2.0 * h))
        .collect()
}

/// Mirror a scalar field on `grid` onto the grid doubled across Γ_out (even extension).
pub fn mirror_scalar_across_outflow(grid: &Grid, doubled: &Grid, field: &ScalarField) -> ScalarField {
    ScalarField::from_fn(doubled, |n, _| field[grid.fold_from_doubled(doubled, n)])
}

/// Mirror a vector field with the antisymmetric rule (axial component odd).
pub fn mirror_vector_across_outflow(grid: &Grid, doubled: &Grid, field: &VectorField) -> VectorField {
    let n0 = grid.cells(0);
    VectorField::from_components(
        (0..grid.dim())
            .map(|c| {
                ScalarField::from_fn(doubled, |n, _| {
                    let v = field[c][grid.fold_from_doubled(doubled, n)];
                    if c == 0 && doubled.multi_index(n)[0] > n0 {
                        -v
                    } else {
                        v
                    }
                })
            })
            .collect(),
    )
}
