//! The perturbation system around the background flow: assembly of the
//! right-hand sides, the block-split linear step and the successive
//! approximations.

mod assemble;
mod iterate;
mod linear;
mod setup;
mod state;

pub use assemble::{assemble_fgh, LinearProblemData};
pub use iterate::{
    picard_iterate, picard_with, uniqueness_probe, IterationRecord, IterationReport, PicardOutcome, PicardSettings,
    PicardStatus, RATIO_FLOOR,
};
pub use linear::{InnerSettings, LinearCoefficients, LinearStepReport, LinearStepSolver};
pub use setup::Setup;
pub use state::{FlowState, PhysicalFields, RHO_MIN};
