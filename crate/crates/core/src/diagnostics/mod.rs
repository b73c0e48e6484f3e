//! Residual evaluation of the full system, the inequality checkers and their
//! calibration.

mod calibration;
mod identity;
mod inequalities;
mod residual;
mod samples;

pub use calibration::{
    draw_samples, Calibration, CalibratedConstant, CheckerVerdict, SampleCounts, SampleTable, CALIBRATION_FACTOR,
    DEFAULT_SEED, INTERPOLATION_EPS, OUTLIER_FACTOR, SAMPLE_VELOCITY,
};
pub use identity::{helmholtz_split, trans_identity, HelmholtzSplit, TransIdentity};
pub use inequalities::{
    dual_norm, energy_sides, inflow_l2, interpolation_id, interpolation_sides, korn_form, korn_sides, poincare_sides,
    ratio, transport_sides, InequalityVerdict, PoincareVariant,
};
pub use residual::{balance_fields, perturbation_residual, residual_main_system, BalanceFields, MainResidual};
pub use samples::SampleRng;
