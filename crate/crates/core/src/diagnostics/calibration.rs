//! Frozen constants of the inequality checkers.
//!
//! A calibration run draws random smooth samples from a fixed seed, records
//! `lhs/rhs` for every checker and registers twice the largest ratio. A
//! verification run draws a fresh family and checks every sample against the
//! registered constant and against ten times the calibration median.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::inequalities::{
    energy_sides, interpolation_id, interpolation_sides, korn_sides, poincare_sides, ratio, transport_sides,
    InequalityVerdict, PoincareVariant,
};
use super::samples::SampleRng;
use crate::elliptic::ScreenedSolver;
use crate::error::Result;
use crate::grid::{Grid, GridDescription};
use crate::picard::{FlowState, InnerSettings, LinearCoefficients, LinearStepSolver};
use crate::transport::march;

pub const DEFAULT_SEED: u64 = 1729;
/// Registered constant = `CALIBRATION_FACTOR · max ratio`.
pub const CALIBRATION_FACTOR: f64 = 2.0;
/// Verification fails if a sample ratio exceeds this multiple of the median.
pub const OUTLIER_FACTOR: f64 = 10.0;
pub const INTERPOLATION_EPS: [f64; 3] = [0.5, 0.1, 0.02];
/// Max norm of the random perturbation velocities.
pub const SAMPLE_VELOCITY: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleCounts {
    pub fields: usize,
    pub datasets: usize,
    pub transport: usize,
}

impl Default for SampleCounts {
    fn default() -> Self {
        Self { fields: 100, datasets: 20, transport: 50 }
    }
}

/// `(lhs, rhs)` pairs per checker id.
pub type SampleTable = BTreeMap<String, Vec<(f64, f64)>>;

fn sample_seed(seed: u64, family: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (family << 48) ^ i as u64
}

/// Draws every sample family; deterministic in `seed` regardless of thread count.
pub fn draw_samples(grid: &Grid, coef: &LinearCoefficients, p: f64, seed: u64, counts: SampleCounts) -> Result<SampleTable> {
    let mut table = SampleTable::new();

    let fields: Vec<Vec<(String, (f64, f64))>> = (0..counts.fields)
        .into_par_iter()
        .map(|i| {
            let mut rng = SampleRng::new(sample_seed(seed, 1, i));
            let f = rng.scalar(grid);
            let v = rng.tangent(grid, 1.0);
            let mut out = Vec::new();
            for variant in [PoincareVariant::BoundaryToBoundary, PoincareVariant::BoundaryToVolume] {
                out.push((variant.id().to_string(), poincare_sides(grid, &f, variant)));
            }
            out.push(("korn".to_string(), korn_sides(grid, &v, coef.mu, coef.alpha)));
            for eps in INTERPOLATION_EPS {
                out.push((interpolation_id(eps), interpolation_sides(grid, &f, eps, p)));
            }
            out
        })
        .collect();
    for row in fields {
        for (id, s) in row {
            table.entry(id).or_default().push(s);
        }
    }

    let transport: Vec<Result<(f64, f64)>> = (0..counts.transport)
        .into_par_iter()
        .map(|i| {
            let problem = SampleRng::new(sample_seed(seed, 2, i)).transport(grid, SAMPLE_VELOCITY);
            let w = march(&problem, grid)?;
            Ok(transport_sides(grid, &problem, &w))
        })
        .collect();
    table.insert("transport".into(), transport.into_iter().collect::<Result<_>>()?);

    let solver = LinearStepSolver::new(grid, *coef, InnerSettings::default())?;
    let screened = ScreenedSolver::new(grid)?;
    let zero = FlowState::zeros(grid);
    let energy: Vec<Result<(f64, f64)>> = (0..counts.datasets)
        .into_par_iter()
        .map(|i| {
            let data = SampleRng::new(sample_seed(seed, 3, i)).linear_data(grid, SAMPLE_VELOCITY);
            let (sol, _) = solver.solve(&data, &zero)?;
            Ok(energy_sides(grid, &screened, &data, &sol))
        })
        .collect();
    table.insert("energy".into(), energy.into_iter().collect::<Result<_>>()?);
    Ok(table)
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibratedConstant {
    pub constant: f64,
    pub max_ratio: f64,
    pub median_ratio: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub seed: u64,
    pub grid: GridDescription,
    pub p: f64,
    pub counts: SampleCounts,
    pub constants: BTreeMap<String, CalibratedConstant>,
}

/// Outcome of one checker in a verification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckerVerdict {
    pub id: String,
    pub constant: f64,
    pub max_ratio: f64,
    pub median_ratio: f64,
    /// Samples with `lhs > C·rhs`.
    pub violations: usize,
    /// Samples whose ratio exceeds `OUTLIER_FACTOR` times the calibration median.
    pub outliers: usize,
    pub pass: bool,
}

impl Calibration {
    pub fn calibrate(grid: &Grid, coef: &LinearCoefficients, p: f64, seed: u64, counts: SampleCounts) -> Result<Self> {
        let table = draw_samples(grid, coef, p, seed, counts)?;
        let constants = table
            .into_iter()
            .map(|(id, sides)| {
                let ratios: Vec<f64> = sides.iter().map(|&(l, r)| ratio(l, r)).collect();
                let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
                let c = CalibratedConstant {
                    constant: CALIBRATION_FACTOR * max_ratio,
                    max_ratio,
                    median_ratio: median(ratios),
                    samples: sides.len(),
                };
                (id, c)
            })
            .collect();
        Ok(Self { seed, grid: grid.describe(), p, counts, constants })
    }

    pub fn constant(&self, id: &str) -> Option<f64> {
        self.constants.get(id).map(|c| c.constant)
    }

    pub fn verdict(&self, id: &str, sides: (f64, f64)) -> Option<InequalityVerdict> {
        self.constant(id).map(|c| InequalityVerdict::new(id, sides, c))
    }

    /// `C(ε)` must not decrease as `ε` shrinks.
    pub fn interpolation_monotone(&self) -> bool {
        let cs: Vec<f64> = INTERPOLATION_EPS.iter().filter_map(|&e| self.constant(&interpolation_id(e))).collect();
        cs.len() == INTERPOLATION_EPS.len() && cs.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn verify(&self, grid: &Grid, coef: &LinearCoefficients, seed: u64) -> Result<Vec<CheckerVerdict>> {
        let table = draw_samples(grid, coef, self.p, seed, self.counts)?;
        Ok(self.judge(&table))
    }

    pub fn judge(&self, table: &SampleTable) -> Vec<CheckerVerdict> {
        self.constants
            .iter()
            .map(|(id, cal)| {
                let sides = table.get(id).map(Vec::as_slice).unwrap_or(&[]);
                let ratios: Vec<f64> = sides.iter().map(|&(l, r)| ratio(l, r)).collect();
                let violations = sides.iter().filter(|&&(l, r)| l > cal.constant * r).count();
                let outliers = ratios.iter().filter(|&&q| q > OUTLIER_FACTOR * cal.median_ratio).count();
                CheckerVerdict {
                    id: id.clone(),
                    constant: cal.constant,
                    max_ratio: ratios.iter().copied().fold(0.0, f64::max),
                    median_ratio: median(ratios),
                    violations,
                    outliers,
                    pass: !sides.is_empty() && violations == 0 && outliers == 0,
                }
            })
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}
