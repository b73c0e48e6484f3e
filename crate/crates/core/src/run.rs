//! Run orchestration shared by the command-line tool: background, Picard
//! iteration, diagnostics and the output files.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::background::LiftSummary;
use crate::config::RunConfig;
use crate::data::{data_distance, DataDistance};
use crate::diagnostics::{
    energy_sides, interpolation_id, interpolation_sides, korn_sides, poincare_sides, transport_sides, Calibration,
    CheckerVerdict, InequalityVerdict, MainResidual, PoincareVariant, SampleCounts, INTERPOLATION_EPS,
};
use crate::elliptic::ScreenedSolver;
use crate::error::{NsfError, Result};
use crate::grid::{Grid, GridDescription};
use crate::manufactured::{channel_grid, convergence_study, fit_order, logistic_case, trans_identity_case, transport_case, Study};
use crate::norms;
use crate::picard::{
    assemble_fgh, picard_iterate, FlowState, LinearCoefficients, PicardOutcome, PicardSettings, PicardStatus, Setup,
};
use crate::transport::{advection_residual, TransportProblem};

/// Configuration resolved into a grid and a solver setup.
pub struct Prepared {
    pub config: RunConfig,
    pub grid: Grid,
    pub setup: Setup,
    pub settings: PicardSettings,
}

impl Prepared {
    /// Invalid grids, parameters or data all surface as [`NsfError::Config`].
    pub fn new(config: RunConfig) -> Result<Self> {
        let as_config = |e: NsfError| match e {
            NsfError::Config(_) => e,
            other => NsfError::Config(other.to_string()),
        };
        config.validate()?;
        let grid = config.build_grid().map_err(as_config)?;
        let data = config.flow_data(&grid).map_err(as_config)?;
        let thermo = config.thermo().map_err(as_config)?;
        let setup = Setup::new(&grid, config.params.physical(), thermo, data).map_err(as_config)?;
        let settings = config.settings();
        Ok(Self { config, grid, setup, settings })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::new(RunConfig::load(path)?)
    }

    pub fn coefficients(&self) -> LinearCoefficients {
        LinearCoefficients::of(&self.setup)
    }

    /// The calibration file named in the config if it matches this grid and
    /// exponent, otherwise a fresh calibration from the configured seed.
    pub fn calibration(&self) -> Result<Calibration> {
        if let Some(path) = &self.config.diagnostics.calibration {
            let path = self.config.base_dir.join(path);
            if path.exists() {
                let cal = Calibration::load(&path)?;
                if cal.grid == self.grid.describe() && cal.p == self.settings.p {
                    return Ok(cal);
                }
            }
        }
        Calibration::calibrate(
            &self.grid,
            &self.coefficients(),
            self.settings.p,
            self.config.diagnostics.seed,
            SampleCounts::default(),
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FinalNorms {
    pub weak: f64,
    pub strong: f64,
    pub u_w2p: f64,
    pub sigma_w1p: f64,
    pub eta_w2p: f64,
    pub sigma_linf_l2: f64,
}

impl FinalNorms {
    pub fn of(grid: &Grid, s: &FlowState, p: f64) -> Self {
        Self {
            weak: s.weak_norm(grid),
            strong: s.strong_norm(grid, p),
            u_w2p: norms::w2p_vec(grid, &s.u, p),
            sigma_w1p: norms::w1p(grid, &s.sigma, p),
            eta_w2p: norms::w2p(grid, &s.eta, p),
            sigma_linf_l2: norms::sup_slice_l2(grid, &s.sigma),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BackgroundSummary {
    pub c_g: f64,
    pub projection: f64,
    pub theta1_ratio: Option<f64>,
    pub theta1_flagged: bool,
    pub lift: LiftSummary,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveSummary {
    pub grid: GridDescription,
    pub p: f64,
    pub d0: DataDistance,
    pub d0_total: f64,
    pub status: PicardStatus,
    pub steps: usize,
    pub final_delta: Option<f64>,
    pub max_q: Option<f64>,
    pub max_step_constant: Option<f64>,
    pub non_contraction: bool,
    pub norms: FinalNorms,
    pub residual: Option<MainResidual>,
    pub background: BackgroundSummary,
    pub verdicts: Vec<InequalityVerdict>,
    pub verdicts_pass: bool,
}

pub struct SolveRun {
    pub outcome: PicardOutcome,
    pub calibration: Calibration,
    pub summary: SolveSummary,
}

/// Inequality verdicts at a converged state. The linear step is evaluated at
/// its own fixed point, the transport estimate on the undamped problem that
/// `σ` solves exactly.
pub fn state_verdicts(setup: &Setup, state: &FlowState, cal: &Calibration) -> Result<Vec<InequalityVerdict>> {
    let grid = &setup.grid;
    let coef = LinearCoefficients::of(setup);
    let data = assemble_fgh(setup, state)?;
    let screened = ScreenedSolver::new(grid)?;
    let source = advection_residual(grid, &data.velocity, &state.sigma, 0.0);
    let transport = TransportProblem::new(data.velocity.clone(), source, data.sigma_in.clone());
    let mut sides = vec![
        ("energy".to_string(), energy_sides(grid, &screened, &data, state)),
        ("transport".to_string(), transport_sides(grid, &transport, &state.sigma)),
        ("korn".to_string(), korn_sides(grid, &state.u, coef.mu, coef.alpha)),
    ];
    for variant in [PoincareVariant::BoundaryToBoundary, PoincareVariant::BoundaryToVolume] {
        sides.push((variant.id().to_string(), poincare_sides(grid, &state.eta, variant)));
    }
    for eps in INTERPOLATION_EPS {
        sides.push((interpolation_id(eps), interpolation_sides(grid, &state.sigma, eps, cal.p)));
    }
    sides
        .into_iter()
        .map(|(id, s)| {
            cal.verdict(&id, s).ok_or_else(|| NsfError::Config(format!("calibration has no constant for {id}")))
        })
        .collect()
}

pub fn solve(prep: &Prepared) -> Result<SolveRun> {
    let setup = &prep.setup;
    let grid = &prep.grid;
    let p = prep.settings.p;
    let outcome = picard_iterate(setup, &FlowState::zeros(grid), &prep.settings)?;
    let calibration = prep.calibration()?;
    let verdicts = if outcome.report.converged() {
        state_verdicts(setup, &outcome.state, &calibration)?
    } else {
        Vec::new()
    };
    let d0 = data_distance(grid, &setup.data, setup.params.alpha, p);
    let report = &outcome.report;
    let bg = &setup.background;
    let summary = SolveSummary {
        grid: grid.describe(),
        p,
        d0,
        d0_total: d0.total(),
        status: report.status.clone(),
        steps: report.steps(),
        final_delta: report.records.last().map(|r| r.delta),
        max_q: report.max_q(),
        max_step_constant: report.max_step_constant(),
        non_contraction: report.non_contraction,
        norms: FinalNorms::of(grid, &outcome.state, p),
        residual: report.final_residual().copied(),
        background: BackgroundSummary {
            c_g: bg.c_g,
            projection: bg.projection,
            theta1_ratio: bg.theta1_ratio,
            theta1_flagged: bg.theta1_flagged(),
            lift: setup.lift.summary(),
        },
        verdicts_pass: verdicts.iter().all(|v| v.pass),
        verdicts,
    };
    Ok(SolveRun { outcome, calibration, summary })
}

fn num(v: f64) -> String {
    v.to_string()
}

fn coordinate_headers(grid: &Grid, prefix: &str) -> Vec<String> {
    (1..=grid.dim()).map(|c| format!("{prefix}{c}")).collect()
}

fn write_csv(path: &Path, header: Vec<String>, rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(&header).map_err(csv_error)?;
    for r in rows {
        w.write_record(&r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> NsfError {
    NsfError::Io(std::io::Error::other(e))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

/// `fields_final.csv` (perturbation and physical fields per node) and
/// `background.csv`.
pub fn write_fields(dir: &Path, setup: &Setup, state: &FlowState) -> Result<()> {
    let grid = &setup.grid;
    let d = grid.dim();
    let mut header = vec!["node".to_string()];
    header.extend(coordinate_headers(grid, "x"));
    header.extend(coordinate_headers(grid, "u"));
    header.extend(["sigma".into(), "eta".into()]);
    let physical = setup.reconstruct(state).ok();
    if physical.is_some() {
        header.extend(coordinate_headers(grid, "v"));
        header.extend(["rho".into(), "theta".into()]);
    }
    let rows = (0..grid.n_nodes()).map(|n| {
        let x = grid.coords(n);
        let mut r = vec![n.to_string()];
        r.extend((0..d).map(|c| num(x[c])));
        r.extend((0..d).map(|c| num(state.u[c][n])));
        r.extend([num(state.sigma[n]), num(state.eta[n])]);
        if let Some(f) = &physical {
            r.extend((0..d).map(|c| num(f.v[c][n])));
            r.extend([num(f.rho[n]), num(f.theta[n])]);
        }
        r
    });
    write_csv(&dir.join("fields_final.csv"), header, rows)?;

    let bg = &setup.background;
    let theta = setup.theta_bar();
    let mut header = vec!["node".to_string()];
    header.extend(coordinate_headers(grid, "x"));
    header.extend(["theta0".into(), "theta1".into(), "theta_bar".into(), "phi".into()]);
    header.extend(coordinate_headers(grid, "u0_"));
    let rows = (0..grid.n_nodes()).map(|n| {
        let x = grid.coords(n);
        let mut r = vec![n.to_string()];
        r.extend((0..d).map(|c| num(x[c])));
        r.extend([num(bg.theta0[n]), num(bg.theta1[n]), num(theta[n]), num(setup.lift.phi[n])]);
        r.extend((0..d).map(|c| num(setup.lift.u0[c][n])));
        r
    });
    write_csv(&dir.join("background.csv"), header, rows)
}

/// All artifacts of a `solve` run. `iterations.jsonl` holds one record per
/// Picard step followed by one line per verdict.
pub fn write_solve_outputs(dir: &Path, prep: &Prepared, run: &SolveRun) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_fields(dir, &prep.setup, &run.outcome.state)?;
    let mut log = fs::File::create(dir.join("iterations.jsonl"))?;
    for r in &run.outcome.report.records {
        writeln!(log, "{}", serde_json::to_string(r)?)?;
    }
    for v in &run.summary.verdicts {
        writeln!(log, "{}", serde_json::json!({ "verdict": v }))?;
    }
    write_json(&dir.join("summary.json"), &run.summary)?;
    run.calibration.save(&dir.join("calibration.json"))
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderCheck {
    pub resolutions: Vec<usize>,
    pub errors: Vec<f64>,
    pub order: f64,
    pub pass: bool,
}

fn order_check(resolutions: &[usize], lowest: f64, mut error: impl FnMut(&Grid) -> Result<f64>) -> Result<OrderCheck> {
    let (mut hs, mut errors) = (Vec::new(), Vec::new());
    for &n in resolutions {
        let g = channel_grid(n)?;
        hs.push(g.h(0));
        errors.push(error(&g)?);
    }
    let order = fit_order(&hs, &errors);
    Ok(OrderCheck { resolutions: resolutions.to_vec(), errors, order, pass: order >= lowest })
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifySummary {
    pub grid: GridDescription,
    pub calibration_seed: u64,
    pub verification_seed: u64,
    pub checkers: Vec<CheckerVerdict>,
    pub interpolation_monotone: bool,
    pub trans_identity: OrderCheck,
    pub transport_oracle: OrderCheck,
    pub logistic_error: f64,
    pub pass: bool,
}

/// Largest admissible deviation of the traced logistic characteristics.
pub const LOGISTIC_TOL: f64 = 1e-8;

/// Calibrates on the configured seed, verifies on the next one and runs the
/// identity and transport oracle studies on the configured resolutions.
pub fn verify(prep: &Prepared) -> Result<(Calibration, VerifySummary)> {
    let cal = prep.calibration()?;
    let coef = prep.coefficients();
    let seed = cal.seed.wrapping_add(1);
    let checkers = cal.verify(&prep.grid, &coef, seed)?;
    let resolutions = &prep.config.diagnostics.resolutions;
    let trans_identity = order_check(resolutions, 0.9, |g| trans_identity_case(g, coef))?;
    let transport_oracle = order_check(resolutions, 0.9, transport_case)?;
    let finest = channel_grid(resolutions.iter().copied().max().unwrap_or(32))?;
    let logistic_error = logistic_case(&finest, 0.1)?;
    let interpolation_monotone = cal.interpolation_monotone();
    let pass = checkers.iter().all(|c| c.pass)
        && interpolation_monotone
        && trans_identity.pass
        && transport_oracle.pass
        && logistic_error <= LOGISTIC_TOL;
    let summary = VerifySummary {
        grid: prep.grid.describe(),
        calibration_seed: cal.seed,
        verification_seed: seed,
        checkers,
        interpolation_monotone,
        trans_identity,
        transport_oracle,
        logistic_error,
        pass,
    };
    Ok((cal, summary))
}

pub fn write_verify_outputs(dir: &Path, cal: &Calibration, summary: &VerifySummary) -> Result<()> {
    fs::create_dir_all(dir)?;
    cal.save(&dir.join("calibration.json"))?;
    write_json(&dir.join("summary.json"), summary)
}

pub fn study(prep: &Prepared, resolutions: &[usize]) -> Result<Study> {
    convergence_study(resolutions, &prep.coefficients())
}

/// `study.csv` with one row per case and resolution, and the fitted orders
/// in `summary.json`.
pub fn write_study_outputs(dir: &Path, study: &Study) -> Result<()> {
    fs::create_dir_all(dir)?;
    let header = ["case", "resolution", "h", "error"].map(String::from).to_vec();
    let rows = study.rows.iter().map(|r| vec![r.case.clone(), r.resolution.to_string(), num(r.h), num(r.error)]);
    write_csv(&dir.join("study.csv"), header, rows)?;
    write_json(&dir.join("summary.json"), study)
}
