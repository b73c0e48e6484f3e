use serde::Serialize;

use crate::data::data_distance;
use crate::diagnostics::{residual_main_system, MainResidual};
use crate::error::{NsfError, Result};

use super::assemble::assemble_fgh;
use super::linear::{InnerSettings, LinearStepReport, LinearStepSolver};
use super::setup::Setup;
use super::state::FlowState;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PicardSettings {
    pub tol: f64,
    pub max_iter: usize,
    /// Exponent of the strong norms in `Aₙ`.
    pub p: f64,
    /// Divergence when `Aₙ > factor·A₁ + 1`.
    pub divergence_factor: f64,
    pub inner: InnerSettings,
}

impl Default for PicardSettings {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 50, p: 4.0, divergence_factor: 10.0, inner: InnerSettings::default() }
    }
}

/// Smallest `δₙ₋₁` for which `qₙ` is recorded.
pub const RATIO_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub step: usize,
    pub a_n: f64,
    pub delta: f64,
    /// `qₙ = δₙ/δₙ₋₁`.
    pub q: Option<f64>,
    /// `Aₙ / (Aₙ₋₁² + Aₙ₋₁³ + D₀)`, the constant of the step recursion.
    pub step_constant: Option<f64>,
    pub inner: LinearStepReport,
    pub residual: MainResidual,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PicardStatus {
    Converged,
    MaxIterations,
    Diverged { step: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationReport {
    pub records: Vec<IterationRecord>,
    pub status: PicardStatus,
    /// Some `qₙ ≥ 1` with `n ≥ 2`.
    pub non_contraction: bool,
}

impl IterationReport {
    pub fn converged(&self) -> bool {
        self.status == PicardStatus::Converged
    }

    pub fn steps(&self) -> usize {
        self.records.len()
    }

    pub fn max_q(&self) -> Option<f64> {
        self.records.iter().filter_map(|r| r.q).reduce(f64::max)
    }

    pub fn max_step_constant(&self) -> Option<f64> {
        self.records.iter().filter_map(|r| r.step_constant).reduce(f64::max)
    }

    pub fn final_residual(&self) -> Option<&MainResidual> {
        self.records.last().map(|r| &r.residual)
    }
}

#[derive(Debug, Clone)]
pub struct PicardOutcome {
    pub state: FlowState,
    pub report: IterationReport,
}

/// Failures that end the iteration with a report rather than an error.
fn is_divergence(e: &NsfError) -> bool {
    matches!(
        e,
        NsfError::OutsideStateBox { .. }
            | NsfError::DensityPositivity { .. }
            | NsfError::InnerStagnation { .. }
            | NsfError::MarchingCfl { .. }
            | NsfError::TransportPrecondition(_)
    )
}

/// Successive approximations: `wⁿ⁺¹` solves the linear system with `F, G, H`
/// and `U` frozen at `wⁿ`. Stops when `δₙ < tol`, after `max_iter` steps,
/// or when the iterates blow up (`Aₙ > 10A₁ + 1`, leaving the constitutive
/// box, losing positivity or monotonicity of the transport sweep).
pub fn picard_iterate(setup: &Setup, initial: &FlowState, settings: &PicardSettings) -> Result<PicardOutcome> {
    let solver = LinearStepSolver::for_setup(setup, settings.inner)?;
    picard_with(setup, &solver, initial, settings)
}

pub fn picard_with(
    setup: &Setup,
    solver: &LinearStepSolver,
    initial: &FlowState,
    settings: &PicardSettings,
) -> Result<PicardOutcome> {
    let grid = &setup.grid;
    initial.check(grid)?;
    let mut state = initial.clone();
    let mut records: Vec<IterationRecord> = Vec::new();
    let mut a1 = None;
    let mut prev_delta: Option<f64> = None;
    let d0 = data_distance(grid, &setup.data, setup.params.alpha, settings.p).total();
    let mut prev_a = initial.strong_norm(grid, settings.p);
    let diverged = |records: Vec<IterationRecord>, state: FlowState, step: usize, reason: String| {
        let non_contraction = records.iter().any(|r| r.step >= 2 && r.q.is_some_and(|q| q >= 1.0));
        Ok(PicardOutcome {
            state,
            report: IterationReport { records, status: PicardStatus::Diverged { step, reason }, non_contraction },
        })
    };
    for step in 1..=settings.max_iter {
        let next = assemble_fgh(setup, &state).and_then(|data| solver.solve(&data, &state).map(|r| (r, data)));
        let ((next, inner), _data) = match next {
            Ok(v) => v,
            Err(e) if is_divergence(&e) => return diverged(records, state, step, e.to_string()),
            Err(e) => return Err(e),
        };
        let delta = next.weak_distance(grid, &state);
        let a_n = next.strong_norm(grid, settings.p);
        let residual = match setup.reconstruct(&next) {
            Ok(fields) => residual_main_system(grid, &fields, &setup.data, &setup.thermo, &setup.params),
            Err(e) => return diverged(records, next, step, e.to_string()),
        };
        let q = prev_delta.filter(|d| *d > RATIO_FLOOR).map(|d| delta / d);
        let denom = prev_a.powi(2) + prev_a.powi(3) + d0;
        let step_constant = (denom > 0.0).then(|| a_n / denom);
        prev_a = a_n;
        records.push(IterationRecord { step, a_n, delta, q, step_constant, inner, residual });
        state = next;
        let a1 = *a1.get_or_insert(a_n);
        if !a_n.is_finite() || a_n > settings.divergence_factor * a1 + 1.0 {
            return diverged(records, state, step, format!("A_n = {a_n:.3e} exceeds {} A_1 + 1", settings.divergence_factor));
        }
        if delta < settings.tol {
            let non_contraction = records.iter().any(|r| r.step >= 2 && r.q.is_some_and(|q| q >= 1.0));
            return Ok(PicardOutcome {
                state,
                report: IterationReport { records, status: PicardStatus::Converged, non_contraction },
            });
        }
        prev_delta = Some(delta);
    }
    let non_contraction = records.iter().any(|r| r.step >= 2 && r.q.is_some_and(|q| q >= 1.0));
    Ok(PicardOutcome { state, report: IterationReport { records, status: PicardStatus::MaxIterations, non_contraction } })
}

/// Weak-norm distance between the limits of two runs started at `a` and `b`.
pub fn uniqueness_probe(setup: &Setup, a: &FlowState, b: &FlowState, settings: &PicardSettings) -> Result<f64> {
    let solver = LinearStepSolver::for_setup(setup, settings.inner)?;
    let ra = picard_with(setup, &solver, a, settings)?;
    let rb = picard_with(setup, &solver, b, settings)?;
    for r in [&ra, &rb] {
        if let PicardStatus::Diverged { step, .. } = r.report.status {
            let a_n = r.report.records.last().map_or(f64::NAN, |x| x.a_n);
            return Err(NsfError::Divergence { step, a_n });
        }
    }
    Ok(ra.state.weak_distance(&setup.grid, &rb.state))
}
