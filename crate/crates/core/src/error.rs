use thiserror::Error;

use crate::grid::Patch;

#[derive(Debug, Error)]
pub enum NsfError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("operation not defined on patch {0:?}")]
    PatchNotAllowed(Patch),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular linear system (zero pivot at row {row})")]
    Singular { row: usize },

    #[error("incompatible Neumann data: defect {defect:.3e} and projection disabled")]
    IncompatibleNeumann { defect: f64 },

    #[error("transport problem ill-posed: {0}")]
    TransportPrecondition(String),

    #[error("marching step violates monotonicity (|U2/(1+U1)| h1/h2 = {ratio:.3} > 1); refine along x1")]
    MarchingCfl { ratio: f64 },

    #[error("characteristic left the channel through a wall at s = {s:.4e} (excursion {excursion:.3e})")]
    TrajectoryEscape { s: f64, excursion: f64 },

    #[error("inverse characteristic lookup failed at {} node(s), first {:?}", .nodes.len(), .nodes.first())]
    InverseLookup { nodes: Vec<usize> },

    #[error("state outside constitutive box at node {node}: rho = {rho:.4}, theta = {theta:.4}")]
    OutsideStateBox { node: usize, rho: f64, theta: f64 },

    #[error("density positivity violated at node {node}: rho = {rho:.4e}")]
    DensityPositivity { node: usize, rho: f64 },

    #[error("inner block iteration stagnated after {sweeps} sweeps (increment {increment:.3e})")]
    InnerStagnation { sweeps: usize, increment: f64, block_residuals: [f64; 3] },

    #[error("Picard iteration diverged at step {step}: A_n = {a_n:.3e}")]
    Divergence { step: usize, a_n: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, NsfError>;
