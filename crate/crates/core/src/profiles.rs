//! Named analytic data profiles and CSV-backed data.
//!
//! A profile is written `name(key=value, ...)`, e.g. `cosine(amplitude=0.5, mode=2)`.
//! Boundary profiles are functions of the normalized tangential coordinate
//! `t ∈ [0, 1]` of each face (`x₁/l` on the walls, `x₂` on Γ_in and Γ_out);
//! volume profiles are functions of the node position.
//!
//! | name       | boundary value     | volume shape                      |
//! |------------|--------------------|-----------------------------------|
//! | `zero`     | 0                  | 0                                 |
//! | `constant` | `value`            | `value`                           |
//! | `cosine`   | `a cos(kπt)`       | `a cos(kπx₁/l) cos(πx₂)`          |
//! | `sine`     | `a sin(kπt)`       | `a sin(kπx₁/l) sin(πx₂)`          |
//! | `bump`     | `a sin²(kπt)`      | `a sin²(kπx₁/l) sin²(πx₂)`        |
//!
//! `sine` and `bump` vanish at the edges of every face; `bump` also has a
//! vanishing tangential derivative there, which keeps the slip and normal
//! velocity conditions compatible at the corners of the channel.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{NsfError, Result};
use crate::grid::{Face, Grid, Patch};

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Zero,
    Constant(f64),
    Cosine { amplitude: f64, mode: f64 },
    Sine { amplitude: f64, mode: f64 },
    Bump { amplitude: f64, mode: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Analytic(Shape),
    /// Rows `x₁, …, x_d, value(s)`; header line optional.
    Csv(PathBuf),
}

fn bad(msg: impl Into<String>) -> NsfError {
    NsfError::Config(msg.into())
}

impl FromStr for Shape {
    type Err = NsfError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = match s.find('(') {
            Some(i) => {
                let rest = s[i + 1..].strip_suffix(')').ok_or_else(|| bad(format!("unbalanced parentheses in {s:?}")))?;
                (&s[..i], rest)
            }
            None => (s, ""),
        };
        let mut kv = BTreeMap::new();
        for part in args.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| bad(format!("expected key=value, got {part:?}")))?;
            let v: f64 = v.trim().parse().map_err(|_| bad(format!("not a number: {v:?}")))?;
            kv.insert(k.trim().to_string(), v);
        }
        let mut take = |key: &str, default: f64| kv.remove(key).unwrap_or(default);
        let shape = match name.trim() {
            "zero" => Shape::Zero,
            "constant" => Shape::Constant(take("value", 1.0)),
            "cosine" => Shape::Cosine { amplitude: take("amplitude", 1.0), mode: take("mode", 1.0) },
            "sine" => Shape::Sine { amplitude: take("amplitude", 1.0), mode: take("mode", 1.0) },
            "bump" => Shape::Bump { amplitude: take("amplitude", 1.0), mode: take("mode", 1.0) },
            other => return Err(bad(format!("unknown profile {other:?}"))),
        };
        if let Some(k) = kv.keys().next() {
            return Err(bad(format!("unknown argument {k:?} for profile {name:?}")));
        }
        Ok(shape)
    }
}

impl Shape {
    fn of_t(&self, t: f64) -> f64 {
        match *self {
            Shape::Zero => 0.0,
            Shape::Constant(v) => v,
            Shape::Cosine { amplitude, mode } => amplitude * (mode * PI * t).cos(),
            Shape::Sine { amplitude, mode } => amplitude * (mode * PI * t).sin(),
            Shape::Bump { amplitude, mode } => amplitude * (mode * PI * t).sin().powi(2),
        }
    }

    pub fn boundary(&self, grid: &Grid, face: Face, x: [f64; 3]) -> f64 {
        let t = if face.axis == 0 { x[1] } else { x[0] / grid.domain().length() };
        self.of_t(t)
    }

    pub fn volume(&self, grid: &Grid, x: [f64; 3]) -> f64 {
        let t = x[0] / grid.domain().length();
        match *self {
            Shape::Zero => 0.0,
            Shape::Constant(v) => v,
            Shape::Cosine { .. } => self.of_t(t) * (PI * x[1]).cos(),
            Shape::Sine { .. } => self.of_t(t) * (PI * x[1]).sin(),
            Shape::Bump { .. } => self.of_t(t) * (PI * x[1]).sin().powi(2),
        }
    }
}

impl Profile {
    /// Parses a profile; strings ending in `.csv` are file paths relative to `base`.
    pub fn parse(s: &str, base: &Path) -> Result<Self> {
        let s = s.trim();
        if s.ends_with(".csv") {
            Ok(Profile::Csv(base.join(s)))
        } else {
            Ok(Profile::Analytic(s.parse()?))
        }
    }

    pub fn zero() -> Self {
        Profile::Analytic(Shape::Zero)
    }

    /// Values at `nodes` (`width` values each).
    pub fn sample(&self, grid: &Grid, nodes: &[(usize, Option<Face>)], width: usize) -> Result<Vec<Vec<f64>>> {
        match self {
            Profile::Analytic(shape) => Ok(nodes
                .iter()
                .map(|&(n, face)| {
                    let x = grid.coords(n);
                    let v = match face {
                        Some(f) => shape.boundary(grid, f, x),
                        None => shape.volume(grid, x),
                    };
                    vec![v; width]
                })
                .collect()),
            Profile::Csv(path) => {
                let table = read_csv(path, grid, width)?;
                nodes
                    .iter()
                    .map(|&(n, _)| {
                        table.get(&n).cloned().ok_or_else(|| {
                            bad(format!("{} has no row for node at {:?}", path.display(), grid.coords(n)))
                        })
                    })
                    .collect()
            }
        }
    }
}

fn read_csv(path: &Path, grid: &Grid, width: usize) -> Result<BTreeMap<usize, Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| bad(format!("{}: {e}", path.display())))?;
    let d = grid.dim();
    let mut out = BTreeMap::new();
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(format!("{}: {e}", path.display())))?;
        let at = || format!("{}:{}", path.display(), record.position().map_or(k as u64 + 1, |p| p.line()));
        let cols: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let cols = match cols {
            Ok(c) => c,
            Err(_) if k == 0 => continue,
            Err(_) => return Err(bad(format!("{}: not numeric", at()))),
        };
        if cols.len() != d + width {
            return Err(bad(format!("{}: expected {} columns", at(), d + width)));
        }
        let mut idx = [0usize; 3];
        for a in 0..d {
            let i = (cols[a] / grid.h(a)).round();
            if (cols[a] - i * grid.h(a)).abs() > 1e-6 * grid.h(a) || i < 0.0 || i as usize > grid.cells(a) {
                return Err(bad(format!("{}: point is not a grid node", at())));
            }
            idx[a] = i as usize;
        }
        out.insert(grid.index(idx), cols[d..].to_vec());
    }
    Ok(out)
}

/// Nodes of the faces on `patches`, paired with their face.
pub fn face_nodes(grid: &Grid, patches: &[Patch]) -> Vec<(usize, Option<Face>)> {
    grid.faces()
        .filter(|f| patches.contains(&f.patch()))
        .flat_map(|f| grid.face_nodes(f).iter().map(move |&n| (n, Some(f))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_named_profiles() {
        assert_eq!("zero".parse::<Shape>().unwrap(), Shape::Zero);
        assert_eq!(
            "cosine(amplitude=0.001)".parse::<Shape>().unwrap(),
            Shape::Cosine { amplitude: 0.001, mode: 1.0 }
        );
        assert_eq!("bump( amplitude = 2 , mode=3)".parse::<Shape>().unwrap(), Shape::Bump { amplitude: 2.0, mode: 3.0 });
        assert!("cosine(amp=1)".parse::<Shape>().is_err());
        assert!("wave".parse::<Shape>().is_err());
        assert!("sine(amplitude=x)".parse::<Shape>().is_err());
    }
}
