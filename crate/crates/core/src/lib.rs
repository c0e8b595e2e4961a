//! Radially symmetric barotropic compressible Navier-Stokes flow with the
//! degenerate viscosity pair `mu = rho^alpha`, `lambda = (alpha - 1) rho^alpha`.
//!
//! The crate is organised bottom-up:
//!
//! * [`params`]: model constants and the exact admissibility thresholds of the
//!   global-existence windows in `(alpha, gamma)`.
//! * [`model`]: constitutive laws, the effective velocity and pointwise PDE
//!   residuals.
//! * [`grid`]: the cell-centred radial grid, fluid states, initial data and the
//!   Lagrangian mass coordinate.
//! * [`solver`]: finite-volume time stepping with far-field or wall boundaries.
//! * [`diagnostics`]: energy, BD entropy, moment and norm functionals together
//!   with their discrete balance residuals.
//! * [`verification`]: independent oracles (manufactured solutions, adaptive
//!   quadrature, high-order stencils) and the convergence study.
//! * [`cli`]: configuration files, output formats and the command drivers.

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod model;
pub mod params;
pub mod solver;
pub mod verification;

pub use error::{Error, Result};
pub use grid::{build_grid, FluidState, InitialDataSpec, RadialGrid};
pub use params::{AdmissibilityReport, ModelParams, Regime};
pub use solver::{Boundary, SchemeConfig, StepReport};
