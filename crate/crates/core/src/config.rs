//! TOML run configuration.
//!
//! ```toml
//! [domain]
//! length = 2.0
//! dim = 2
//!
//! [grid]
//! resolution = [32, 16]
//!
//! [params]
//! kappa = 50.0
//!
//! [pressure]
//! law = "ideal"
//!
//! [data]
//! scale = 1e-3
//! f = "cosine(amplitude=1)"
//! g = "cosine(amplitude=1)"
//!
//! [iteration]
//! tol = 1e-10
//! ```
//!
//! Every section and key is optional except `[grid]`. Data are the
//! background values plus `scale` times the perturbation profiles (see
//! [`crate::profiles`]).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::constitutive::{CorrectedGas, PhysicalParams, Thermo};
use crate::data::FlowData;
use crate::error::{NsfError, Result};
use crate::field::{BoundaryField, VectorField};
use crate::grid::{ChannelDomain, Face, Grid, Patch};
use crate::picard::{InnerSettings, PicardSettings};
use crate::profiles::{face_nodes, Profile};

/// Smallest admissible exponent of the strong norms.
pub const P_MIN: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DomainConfig {
    pub length: f64,
    pub dim: usize,
}

impl Default for DomainConfig {
    fn default() -> Self {
        Self { length: 2.0, dim: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Cells per axis.
    pub resolution: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsConfig {
    pub mu: f64,
    pub lambda: f64,
    pub kappa: f64,
    pub alpha: f64,
    #[serde(rename = "L")]
    pub l_wall: f64,
    #[serde(rename = "T0")]
    pub t0: f64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        let p = PhysicalParams::default();
        Self { mu: p.mu, lambda: p.lambda, kappa: p.kappa, alpha: p.alpha, l_wall: p.l_wall, t0: p.t0 }
    }
}

impl ParamsConfig {
    pub fn physical(&self) -> PhysicalParams {
        PhysicalParams {
            mu: self.mu,
            lambda: self.lambda,
            kappa: self.kappa,
            alpha: self.alpha,
            l_wall: self.l_wall,
            t0: self.t0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PressureLawKind {
    /// `π = p₀ρθ/T₀`, `e_π = 0`.
    Ideal,
    /// [`CorrectedGas`] with coefficients `a, b, c`.
    Corrected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PressureConfig {
    pub law: PressureLawKind,
    pub p0: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Default for PressureConfig {
    fn default() -> Self {
        Self { law: PressureLawKind::Ideal, p0: 1.0, a: 0.0, b: 0.0, c: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataConfig {
    pub scale: f64,
    pub f: String,
    pub b: String,
    pub d: String,
    pub rho_in: String,
    pub g: String,
    #[serde(rename = "T1")]
    pub t1: String,
}

impl Default for DataConfig {
    fn default() -> Self {
        let z = || "zero".to_string();
        Self { scale: 1.0, f: z(), b: z(), d: z(), rho_in: z(), g: z(), t1: z() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IterationConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub p: f64,
    pub inner_tol: f64,
    pub max_sweeps: usize,
    pub divergence_factor: f64,
}

impl Default for IterationConfig {
    fn default() -> Self {
        let s = PicardSettings::default();
        Self {
            tol: s.tol,
            max_iter: s.max_iter,
            p: s.p,
            inner_tol: s.inner.tol,
            max_sweeps: s.inner.max_sweeps,
            divergence_factor: s.divergence_factor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsConfig {
    pub seed: u64,
    /// Frozen calibration file; calibrated on the fly when absent.
    pub calibration: Option<PathBuf>,
    /// Resolutions (cells along `x₁`) of `nsf study` when not given on the command line.
    pub resolutions: Vec<usize>,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self { seed: 1729, calibration: None, resolutions: vec![16, 32, 64] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub domain: DomainConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub params: ParamsConfig,
    #[serde(default)]
    pub pressure: PressureConfig,
    #[serde(default)]
    pub data: DataConfig,
    #[serde(default)]
    pub iteration: IterationConfig,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    /// Directory that relative paths refer to.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl RunConfig {
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| NsfError::Config(e.to_string()))?;
        cfg.base_dir = base_dir.to_path_buf();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| NsfError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(NsfError::Config(m));
        if !(self.iteration.p > P_MIN) {
            return bad(format!("iteration.p must exceed {P_MIN}, got {}", self.iteration.p));
        }
        if self.grid.resolution.len() != self.domain.dim {
            return bad(format!("grid.resolution needs {} entries", self.domain.dim));
        }
        if !(self.data.scale.is_finite()) {
            return bad("data.scale must be finite".into());
        }
        if !(self.iteration.tol > 0.0 && self.iteration.inner_tol > 0.0) || self.iteration.max_iter == 0 {
            return bad("iteration tolerances must be positive and max_iter at least 1".into());
        }
        self.params.physical().validate().map_err(|e| NsfError::Config(e.to_string()))?;
        for s in [&self.data.f, &self.data.b, &self.data.d, &self.data.rho_in, &self.data.g, &self.data.t1] {
            Profile::parse(s, &self.base_dir)?;
        }
        Ok(())
    }

    pub fn with_resolution(&self, resolution: Vec<usize>) -> Self {
        let mut c = self.clone();
        c.grid.resolution = resolution;
        c
    }

    pub fn build_grid(&self) -> Result<Grid> {
        Grid::build(ChannelDomain::new(self.domain.length, self.domain.dim)?, &self.grid.resolution)
    }

    pub fn thermo(&self) -> Result<Thermo> {
        let p = &self.pressure;
        let t0 = self.params.t0;
        match p.law {
            PressureLawKind::Ideal => Thermo::ideal_gas_defaults(p.p0, t0),
            PressureLawKind::Corrected => {
                let law = CorrectedGas { p0: p.p0, t0, a: p.a, b: p.b, c: p.c };
                Thermo::new(Box::new(law), Box::new(law), t0)
            }
        }
    }

    pub fn settings(&self) -> PicardSettings {
        let it = &self.iteration;
        PicardSettings {
            tol: it.tol,
            max_iter: it.max_iter,
            p: it.p,
            divergence_factor: it.divergence_factor,
            inner: InnerSettings { tol: it.inner_tol, max_sweeps: it.max_sweeps, ..InnerSettings::default() },
        }
    }

    /// Background data plus `scale` times the configured perturbations.
    pub fn flow_data(&self, grid: &Grid) -> Result<FlowData> {
        let dc = &self.data;
        let s = dc.scale;
        let parse = |v: &str| Profile::parse(v, &self.base_dir);
        let mut data = FlowData::background(grid, self.params.alpha);
        let d = grid.dim();

        let volume: Vec<(usize, Option<Face>)> = (0..grid.n_nodes()).map(|n| (n, None)).collect();
        let f = parse(&dc.f)?.sample(grid, &volume, d)?;
        // the second component of an analytic force profile is halved so that
        // a single shape drives a genuinely two-dimensional force
        let analytic = matches!(parse(&dc.f)?, Profile::Analytic(_));
        data.force = VectorField::from_fn(grid, |n, _| {
            (0..d).map(|c| s * f[n][c] * if analytic && c > 0 { 0.5 } else { 1.0 }).collect()
        });

        let boundary = |text: &str, patches: &[Patch]| -> Result<BoundaryField> {
            let nodes = face_nodes(grid, patches);
            let vals = parse(text)?.sample(grid, &nodes, 1)?;
            let mut out = BoundaryField::zeros(grid);
            for ((n, face), v) in nodes.iter().zip(vals) {
                let face = face.expect("boundary node");
                let pos = grid.face_position(face, *n).expect("node on face");
                out.face_mut(face)[pos] = s * v[0];
            }
            Ok(out)
        };
        let b = boundary(&dc.b, &Patch::ALL)?;
        for c in 0..d {
            data.slip[c] = data.slip[c].zip_map(&b, |x, y| x + y);
        }
        let dn = boundary(&dc.d, &[Patch::Inflow, Patch::Outflow])?;
        data.normal_velocity = data.normal_velocity.zip_map(&dn, |x, y| x + y);
        let rho = boundary(&dc.rho_in, &[Patch::Inflow])?;
        data.rho_in = rho.face(Face::INFLOW).iter().map(|r| 1.0 + r).collect();
        data.heat_flux = boundary(&dc.g, &[Patch::Wall])?;
        data.wall_temperature = boundary(&dc.t1, &[Patch::Wall])?;
        data.validate(grid).map_err(|e| NsfError::Config(e.to_string()))?;
        Ok(data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(extra: &str) -> Result<RunConfig> {
        RunConfig::from_toml(&format!("[grid]\nresolution = [16, 8]\n{extra}"), Path::new("."))
    }

    #[test]
    fn defaults_and_validation() {
        let c = cfg("").unwrap();
        assert_eq!(c.params.kappa, 50.0);
        assert_eq!(c.iteration.p, 4.0);
        assert!(cfg("[iteration]\np = 3.0").is_err());
        assert!(cfg("[params]\nkappa = -1.0").is_err());
        assert!(cfg("[data]\ng = \"wave(amplitude=1)\"").is_err());
        assert!(cfg("[bogus]\nx = 1").is_err());
    }

    #[test]
    fn zero_perturbation_gives_background_data() {
        let c = cfg("").unwrap();
        let grid = c.build_grid().unwrap();
        assert_eq!(c.flow_data(&grid).unwrap(), FlowData::background(&grid, c.params.alpha));
    }

    #[test]
    fn scale_multiplies_perturbations() {
        let c = cfg("[data]\nscale = 0.5\ng = \"constant(value=2)\"\nrho_in = \"bump(amplitude=0.2)\"").unwrap();
        let grid = c.build_grid().unwrap();
        let data = c.flow_data(&grid).unwrap();
        assert!(data.heat_flux.face(Face::new(1, crate::grid::Side::Low)).iter().all(|v| *v == 1.0));
        assert!(data.heat_flux.face(Face::INFLOW).iter().all(|v| *v == 0.0));
        assert!(data.rho_in.iter().all(|r| (1.0..=1.1 + 1e-12).contains(r)));
    }
}
