//! Steady compressible Navier–Stokes–Fourier flow in a channel, computed as a
//! small perturbation of a constant axial flow by successive approximations.

pub mod background;
pub mod banded;
pub mod config;
pub mod constitutive;
pub mod data;
pub mod diagnostics;
pub mod elliptic;
pub mod error;
pub mod field;
pub mod grid;
pub mod manufactured;
pub mod norms;
pub mod picard;
pub mod profiles;
pub mod run;
pub mod stencil;
pub mod transport;

pub use error::{NsfError, Result};
pub use field::{BoundaryField, ScalarField, VectorField};
pub use grid::{ChannelDomain, Face, Grid, Patch, Side};
