use crate::banded::{BandLu, TripletBuilder};
use crate::error::Result;
use crate::field::{ScalarField, VectorField};
use crate::grid::Grid;
use crate::stencil::{ScalarBc, Stencils};

/// `u = ∇φ + A` with `A` orthogonal to every discrete gradient.
#[derive(Debug, Clone)]
pub struct HelmholtzParts {
    pub phi: ScalarField,
    pub grad_phi: VectorField,
    pub solenoidal: VectorField,
}

/// Weighted least-squares projection onto discrete gradients: solves
/// `GᵀWG φ = GᵀW u` where `G` is the one-sided-at-the-boundary gradient and
/// `W` the trapezoid weights. `A = u − Gφ` is then exactly W-orthogonal to
/// the range of `G`, which is the discrete form of `div A = 0`, `A·n = 0`.
#[derive(Debug, Clone)]
pub struct HelmholtzSolver {
    grid: Grid,
    lu: BandLu,
}

const PINNED: usize = 0;

impl HelmholtzSolver {
    pub fn new(grid: &Grid) -> Result<Self> {
        let st = Stencils::new(grid);
        let bc = ScalarBc::free(grid);
        let n = grid.n_nodes();
        let mut t = TripletBuilder::new(n);
        for node in 0..n {
            let w = grid.volume_weight(node);
            for a in 0..grid.dim() {
                let g = st.d1(&bc, node, a);
                for &(i, ci) in &g.terms {
                    if i == PINNED {
                        continue;
                    }
                    for &(j, cj) in &g.terms {
                        t.add(i, j, w * ci * cj);
                    }
                }
            }
        }
        t.add(PINNED, PINNED, 1.0);
        Ok(Self { grid: grid.clone(), lu: t.into_band().factor()? })
    }

    pub fn decompose(&self, u: &VectorField) -> HelmholtzParts {
        let grid = &self.grid;
        let st = Stencils::new(grid);
        let bc = ScalarBc::free(grid);
        let mut b = vec![0.0; grid.n_nodes()];
        for node in 0..grid.n_nodes() {
            let w = grid.volume_weight(node);
            for a in 0..grid.dim() {
                for &(i, ci) in &st.d1(&bc, node, a).terms {
                    b[i] += w * ci * u[a][node];
                }
            }
        }
        b[PINNED] = 0.0;
        let mut phi = ScalarField::from_values(self.lu.solve(&b));
        let m = phi.mean(grid);
        for v in phi.values_mut() {
            *v -= m;
        }
        let grad_phi = st.gradient(&phi, &bc);
        let solenoidal = u.sub(&grad_phi);
        HelmholtzParts { phi, grad_phi, solenoidal }
    }
}

pub fn helmholtz_decompose(u: &VectorField, grid: &Grid) -> Result<HelmholtzParts> {
    Ok(HelmholtzSolver::new(grid)?.decompose(u))
}
