//! Finite-volume time stepping of the radial system.
//!
//! Density and velocity are colocated at cell centres. The continuity
//! equation is advanced in flux form through the face areas `r^{N-1}`, so
//! the discrete mass `Σ rho_i V_i` changes only through the outer face. The
//! momentum equation is advanced in nonconservative form with the viscous
//! operator kept in its grouped form
//!
//! ```text
//! alpha (r^{-(N-1)} mu (r^{N-1} u)_r)_r - (N-1) (mu)_r u / r,   mu = rho^alpha
//! ```
//!
//! which is tridiagonal in `u` for a frozen density, so the same coefficients
//! serve the explicit update and the semi-implicit solve.
//!
//! Two layers of ghost cells sit on each side. At the origin density is
//! reflected evenly and velocity oddly. At `r_max` the far-field boundary
//! imposes `(rho~, 0)`, while the wall reflects density evenly and velocity
//! oddly so the face velocity vanishes there.

mod run;

pub use run::{run, RunFailure, RunOutput};

use std::fmt;
use std::str::FromStr;

use crate::diagnostics::boundary_contamination;
use crate::error::{Error, Result};
use crate::grid::{check_positive, FluidState, RadialGrid};
use crate::model::ConstitutiveSet;
use crate::params::ModelParams;

const GHOSTS: usize = 2;

/// Outer boundary treatment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Truncated Cauchy problem: Dirichlet `(rho~, 0)` beyond `r_max`.
    FarField,
    /// Ball problem: impermeable wall at `r_max`, `u = 0` on the boundary.
    Wall,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundary::FarField => "far-field",
            Boundary::Wall => "wall",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Advection {
    Upwind1,
    MusclMinmod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViscousTreatment {
    Explicit,
    SemiImplicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeIntegrator {
    SspRk2,
    /// First order; for debugging only.
    ForwardEuler,
}

macro_rules! string_enum {
    ($ty:ident { $($variant:ident => $name:literal),+ $(,)? }) => {
        impl $ty {
            pub fn as_str(self) -> &'static str {
                match self { $($ty::$variant => $name),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok($ty::$variant),)+
                    other => Err(Error::usage(format!(
                        concat!("unknown ", stringify!($ty), " '{}', expected one of: ", $($name, " "),+),
                        other
                    ))),
                }
            }
        }
    };
}

string_enum!(Advection { Upwind1 => "upwind1", MusclMinmod => "muscl-minmod" });
string_enum!(ViscousTreatment { Explicit => "explicit", SemiImplicit => "semi-implicit" });
string_enum!(TimeIntegrator { SspRk2 => "ssp-rk2", ForwardEuler => "forward-euler" });

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub advection: Advection,
    pub viscous: ViscousTreatment,
    pub integrator: TimeIntegrator,
    pub cfl_number: f64,
    pub viscous_safety: f64,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        SchemeConfig {
            advection: Advection::MusclMinmod,
            viscous: ViscousTreatment::Explicit,
            integrator: TimeIntegrator::SspRk2,
            cfl_number: 0.4,
            viscous_safety: 0.4,
        }
    }
}

impl SchemeConfig {
    pub fn with_advection(mut self, advection: Advection) -> Self {
        self.advection = advection;
        self
    }

    pub fn with_viscous(mut self, viscous: ViscousTreatment) -> Self {
        self.viscous = viscous;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("cfl_number", self.cfl_number), ("viscous_safety", self.viscous_safety)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::usage(format!("{name} must lie in (0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub dt_used: f64,
    pub advective_dt: f64,
    pub viscous_dt: f64,
    pub min_rho: f64,
    pub max_rho: f64,
    /// Largest relative deviation from `(rho~, 0)` in the outer 5% of cells;
    /// velocity is scaled by the far-field sound speed.
    pub boundary_contamination: f64,
    /// Mass that left through `r_max` during the step, in units of
    /// `Σ rho_i V_i`.
    pub boundary_mass_outflow: f64,
    pub step_accepted: bool,
    pub rejection: Option<String>,
}

/// Body forces added to the right-hand sides, e.g. manufactured sources.
pub trait SourceTerms: Sync {
    /// Fill the continuity and momentum sources at time `t`.
    fn fill(&self, grid: &RadialGrid, t: f64, mass: &mut [f64], momentum: &mut [f64]);
}

/// A state extended by two ghost cells on each side.
#[derive(Debug, Clone, PartialEq)]
pub struct GhostedState {
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
}

impl GhostedState {
    pub const GHOSTS: usize = GHOSTS;

    /// Value at cell `i`, which may be `-2, -1` or `n, n + 1`.
    pub fn rho_at(&self, i: isize) -> f64 {
        self.rho[(i + GHOSTS as isize) as usize]
    }

    pub fn u_at(&self, i: isize) -> f64 {
        self.u[(i + GHOSTS as isize) as usize]
    }
}

fn fill_ghosts(rho: &[f64], u: &[f64], boundary: Boundary, far: f64, grho: &mut [f64], gu: &mut [f64]) {
    let n = rho.len();
    grho[GHOSTS..GHOSTS + n].copy_from_slice(rho);
    gu[GHOSTS..GHOSTS + n].copy_from_slice(u);
    for j in 0..GHOSTS {
        grho[GHOSTS - 1 - j] = rho[j];
        gu[GHOSTS - 1 - j] = -u[j];
        match boundary {
            Boundary::FarField => {
                grho[GHOSTS + n + j] = far;
                gu[GHOSTS + n + j] = 0.0;
            }
            Boundary::Wall => {
                grho[GHOSTS + n + j] = rho[n - 1 - j];
                gu[GHOSTS + n + j] = -u[n - 1 - j];
            }
        }
    }
}

/// Populate ghost layers: even density and odd velocity about `r = 0`, and
/// the boundary-specific outer values.
pub fn apply_boundary(state: &FluidState, params: &ModelParams) -> Result<GhostedState> {
    let n = state.len();
    let far = match state.boundary {
        Boundary::FarField => params.require_far_density()?,
        Boundary::Wall => 0.0,
    };
    let mut g = GhostedState {
        rho: vec![0.0; n + 2 * GHOSTS],
        u: vec![0.0; n + 2 * GHOSTS],
    };
    fill_ghosts(&state.rho, &state.u, state.boundary, far, &mut g.rho, &mut g.u);
    Ok(g)
}

#[inline]
fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

/// Thomas algorithm for `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`.
fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64], scratch: &mut [f64]) {
    let n = diag.len();
    scratch[0] = upper[0] / diag[0];
    rhs[0] /= diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i] * scratch[i - 1];
        scratch[i] = upper[i] / m;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / m;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= scratch[i] * rhs[i + 1];
    }
}

/// Reusable workspace for stepping one grid.
pub struct Stepper<'a> {
    grid: &'a RadialGrid,
    law: ConstitutiveSet,
    scheme: SchemeConfig,
    sources: Option<&'a dyn SourceTerms>,
    // r^{N-1} at faces and centres (centres extended by ghosts)
    face_area: Vec<f64>,
    center_pow: Vec<f64>,
    // N / (r_i^N - r_{i-1}^N) for the face between centres i - 1 and i
    face_divergence: Vec<f64>,
    grho: Vec<f64>,
    gu: Vec<f64>,
    gp: Vec<f64>,
    gmu: Vec<f64>,
    slope: Vec<f64>,
    face_u: Vec<f64>,
    face_flux: Vec<f64>,
    upwind_u: Vec<f64>,
    s_mass: Vec<f64>,
    s_mom: Vec<f64>,
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    d_rho: Vec<f64>,
    d_u: Vec<f64>,
    scratch: Vec<f64>,
}

/// Result of one right-hand-side evaluation; the derivatives live in the
/// stepper's buffers.
struct Rhs {
    outer_flux: f64,
}

impl<'a> Stepper<'a> {
    pub fn new(grid: &'a RadialGrid, params: ModelParams, scheme: SchemeConfig) -> Result<Self> {
        scheme.validate()?;
        let n = grid.n_cells;
        let m = n + 2 * GHOSTS;
        let n1 = grid.dim as i32 - 1;
        let face_area: Vec<f64> = grid.faces.iter().map(|r| r.powi(n1)).collect();
        let center_pow = (0..m)
            .map(|j| ((j as f64 - GHOSTS as f64 + 0.5) * grid.dr).powi(n1))
            .collect();
        // dividing by the exact measure between centres rather than
        // r_f^{N-1} dr keeps (r^{N-1} u)_r / r^{N-1} exact for u = c r, which
        // is what the cells next to the origin see
        let nd = grid.dim as i32;
        let face_divergence = (0..=n)
            .map(|f| {
                if f == 0 {
                    return 0.0;
                }
                let lo = (f as f64 - 0.5) * grid.dr;
                let hi = (f as f64 + 0.5) * grid.dr;
                grid.dim as f64 / (hi.powi(nd) - lo.powi(nd))
            })
            .collect();
        Ok(Stepper {
            grid,
            law: ConstitutiveSet::new(params),
            scheme,
            sources: None,
            face_area,
            center_pow,
            face_divergence,
            grho: vec![0.0; m],
            gu: vec![0.0; m],
            gp: vec![0.0; m],
            gmu: vec![0.0; m],
            slope: vec![0.0; m],
            face_u: vec![0.0; n + 1],
            face_flux: vec![0.0; n + 1],
            upwind_u: vec![0.0; n + 1],
            s_mass: vec![0.0; n],
            s_mom: vec![0.0; n],
            lower: vec![0.0; n],
            diag: vec![0.0; n],
            upper: vec![0.0; n],
            d_rho: vec![0.0; n],
            d_u: vec![0.0; n],
            scratch: vec![0.0; n],
        })
    }

    pub fn with_sources(mut self, sources: &'a dyn SourceTerms) -> Self {
        self.sources = Some(sources);
        self
    }

    pub fn grid(&self) -> &RadialGrid {
        self.grid
    }

    pub fn scheme(&self) -> &SchemeConfig {
        &self.scheme
    }

    fn far_density(&self, boundary: Boundary) -> Result<f64> {
        match boundary {
            Boundary::FarField => self.law.params.require_far_density(),
            Boundary::Wall => Ok(0.0),
        }
    }

    fn load(&mut self, rho: &[f64], u: &[f64], boundary: Boundary, far: f64) {
        fill_ghosts(rho, u, boundary, far, &mut self.grho, &mut self.gu);
        let p = self.law.params;
        for j in 0..self.grho.len() {
            let r = self.grho[j];
            self.gp[j] = p.pressure_coeff * r.powf(p.gamma);
            self.gmu[j] = r.powf(p.alpha);
        }
    }

    /// Assemble the viscous operator rows divided by `rho_i`, from the
    /// loaded ghosted fields.
    fn assemble_viscous(&mut self, boundary: Boundary) {
        let g = self.grid;
        let n = g.n_cells;
        let alpha = self.law.params.alpha;
        let n1 = (g.dim - 1) as f64;
        let inv_dr = 1.0 / g.dr;
        let inv_2dr = 0.5 / g.dr;
        for i in 0..n {
            let j = i + GHOSTS;
            let mu_plus = 0.5 * (self.gmu[j] + self.gmu[j + 1]);
            let cf_plus = alpha * mu_plus * self.face_divergence[i + 1] * inv_dr;
            let mut diag = -cf_plus * self.center_pow[j];
            let mut upper = cf_plus * self.center_pow[j + 1];
            let mut lower = 0.0;
            if i == 0 {
                // the grouped flux at r = 0 is N mu u_r(0) with u_r(0) = u_0 / r_0
                diag -= alpha * g.dim as f64 * self.gmu[j] / (g.centers[0] * g.dr);
            } else {
                let mu_minus = 0.5 * (self.gmu[j - 1] + self.gmu[j]);
                let cf_minus = alpha * mu_minus * self.face_divergence[i] * inv_dr;
                diag -= cf_minus * self.center_pow[j];
                lower = cf_minus * self.center_pow[j - 1];
            }
            if i == n - 1 {
                // fold the ghost value into the row
                if boundary == Boundary::Wall {
                    diag -= upper;
                }
                upper = 0.0;
            }
            let dmu = (self.gmu[j + 1] - self.gmu[j - 1]) * inv_2dr;
            diag -= n1 * dmu / g.centers[i];
            let inv_rho = 1.0 / self.grho[j];
            self.lower[i] = lower * inv_rho;
            self.diag[i] = diag * inv_rho;
            self.upper[i] = upper * inv_rho;
        }
    }

    /// Non-viscous right-hand side into `d_rho` and `d_u`, viscous rows into
    /// `lower/diag/upper`. Expects `load` to have been called.
    fn evaluate(&mut self, t: f64, boundary: Boundary) -> Rhs {
        let g = self.grid;
        let n = g.n_cells;
        let inv_dr = 1.0 / g.dr;
        let muscl = self.scheme.advection == Advection::MusclMinmod;

        if let Some(src) = self.sources {
            src.fill(g, t, &mut self.s_mass, &mut self.s_mom);
        }

        // face velocities
        for f in 0..=n {
            self.face_u[f] = 0.5 * (self.gu[f + 1] + self.gu[f + 2]);
        }
        self.face_u[0] = 0.0;
        if boundary == Boundary::Wall {
            self.face_u[n] = 0.0;
        }

        // density: limited slopes, upwind face states, mass fluxes
        self.limited_slopes(true, muscl);
        for f in 0..=n {
            let uf = self.face_u[f];
            let left = self.grho[f + 1] + 0.5 * self.slope[f + 1];
            let right = self.grho[f + 2] - 0.5 * self.slope[f + 2];
            let rho_face = if uf > 0.0 {
                left
            } else if uf < 0.0 {
                right
            } else {
                0.5 * (left + right)
            };
            self.face_flux[f] = self.face_area[f] * rho_face * uf;
        }
        for i in 0..n {
            self.d_rho[i] = -(self.face_flux[i + 1] - self.face_flux[i]) / g.weights[i];
        }

        // velocity: upwinded face values for u u_r
        self.limited_slopes(false, muscl);
        for f in 0..=n {
            let uf = self.face_u[f];
            let left = self.gu[f + 1] + 0.5 * self.slope[f + 1];
            let right = self.gu[f + 2] - 0.5 * self.slope[f + 2];
            self.upwind_u[f] = if uf > 0.0 {
                left
            } else if uf < 0.0 {
                right
            } else {
                0.5 * (left + right)
            };
        }
        let inv_2dr = 0.5 * inv_dr;
        for i in 0..n {
            let j = i + GHOSTS;
            let rho = self.grho[j];
            let adv = self.gu[j] * (self.upwind_u[i + 1] - self.upwind_u[i]) * inv_dr;
            let dp = (self.gp[j + 1] - self.gp[j - 1]) * inv_2dr;
            self.d_u[i] = -adv - dp / rho;
        }
        if self.sources.is_some() {
            for i in 0..n {
                self.d_rho[i] += self.s_mass[i];
                self.d_u[i] += self.s_mom[i] / self.grho[i + GHOSTS];
            }
        }

        self.assemble_viscous(boundary);
        Rhs {
            outer_flux: self.face_flux[n],
        }
    }

    fn limited_slopes(&mut self, density: bool, muscl: bool) {
        let m = self.grho.len();
        if !muscl {
            self.slope.iter_mut().for_each(|s| *s = 0.0);
            return;
        }
        let q = if density { &self.grho } else { &self.gu };
        self.slope[0] = 0.0;
        self.slope[m - 1] = 0.0;
        for j in 1..m - 1 {
            self.slope[j] = minmod(q[j + 1] - q[j], q[j] - q[j - 1]);
        }
    }

    /// `(advective_dt, viscous_dt)` for the given state.
    ///
    /// `advective_dt = min dr / (|u| + c)`. `viscous_dt = 2 / max_i R_i` where
    /// `R_i` is the Gershgorin bound (absolute row sum) of the discrete
    /// viscous operator divided by `rho_i`; for the planar Laplacian
    /// `nu u_rr` this reduces to `dr^2 / (2 nu)`.
    pub fn stable_dt(&mut self, state: &FluidState) -> Result<(f64, f64)> {
        check_positive(&state.rho)?;
        let far = self.far_density(state.boundary)?;
        self.load(&state.rho, &state.u, state.boundary, far);
        Ok(self.stable_dt_loaded(state))
    }

    fn stable_dt_loaded(&mut self, state: &FluidState) -> (f64, f64) {
        let dr = self.grid.dr;
        let mut adv = f64::INFINITY;
        for (r, v) in state.rho.iter().zip(&state.u) {
            let speed = v.abs() + self.law.sound_speed(*r);
            if speed > 0.0 {
                adv = adv.min(dr / speed);
            }
        }
        self.assemble_viscous(state.boundary);
        let mut radius: f64 = 0.0;
        for i in 0..self.grid.n_cells {
            radius = radius.max(self.lower[i].abs() + self.diag[i].abs() + self.upper[i].abs());
        }
        let visc = if radius > 0.0 { 2.0 / radius } else { f64::INFINITY };
        (adv, visc)
    }

    /// Largest step allowed by the scheme for `state`.
    pub fn dt_bound(&self, advective_dt: f64, viscous_dt: f64) -> f64 {
        let adv = self.scheme.cfl_number * advective_dt;
        match self.scheme.viscous {
            ViscousTreatment::Explicit => adv.min(self.scheme.viscous_safety * viscous_dt),
            ViscousTreatment::SemiImplicit => adv,
        }
    }

    /// One forward-Euler stage from `(rho, u)` at time `t`, into `out_rho`,
    /// `out_u`. Returns the mass flux through `r_max`.
    fn stage(
        &mut self,
        rho: &[f64],
        u: &[f64],
        t: f64,
        dt: f64,
        boundary: Boundary,
        far: f64,
        out_rho: &mut [f64],
        out_u: &mut [f64],
    ) -> f64 {
        let n = self.grid.n_cells;
        self.load(rho, u, boundary, far);
        let rhs = self.evaluate(t, boundary);
        for i in 0..n {
            out_rho[i] = rho[i] + dt * self.d_rho[i];
        }
        match self.scheme.viscous {
            ViscousTreatment::Explicit => {
                for i in 0..n {
                    let mut visc = self.diag[i] * u[i];
                    if i > 0 {
                        visc += self.lower[i] * u[i - 1];
                    }
                    if i + 1 < n {
                        visc += self.upper[i] * u[i + 1];
                    }
                    out_u[i] = u[i] + dt * (self.d_u[i] + visc);
                }
            }
            ViscousTreatment::SemiImplicit => {
                for i in 0..n {
                    out_u[i] = u[i] + dt * self.d_u[i];
                    self.lower[i] *= -dt;
                    self.upper[i] *= -dt;
                    self.diag[i] = 1.0 - dt * self.diag[i];
                }
                solve_tridiagonal(&self.lower, &self.diag, &self.upper, out_u, &mut self.scratch);
            }
        }
        rhs.outer_flux
    }

    /// Advance one step of size `dt`, or of the largest stable size when
    /// `dt` is `None`. A step that would create a nonpositive density is
    /// rejected and the input state returned unchanged.
    pub fn step(&mut self, state: &FluidState, dt: Option<f64>) -> Result<(FluidState, StepReport)> {
        let (adv, visc) = self.stable_dt(state)?;
        let bound = self.dt_bound(adv, visc);
        let dt = match dt {
            Some(dt) if !(dt > 0.0) => {
                return Err(Error::usage(format!("time step must be positive, got {dt}")));
            }
            Some(dt) if dt > bound * (1.0 + 1e-12) => {
                return Err(Error::usage(format!(
                    "time step {dt:e} exceeds the stability bound {bound:e}"
                )));
            }
            Some(dt) => dt,
            None => bound,
        };
        self.advance(state, dt, adv, visc)
    }

    /// Advance towards a target `cap` ahead. The remaining interval is split
    /// into equal steps no larger than the bound, so the last step before the
    /// target is never a sliver.
    pub fn step_capped(&mut self, state: &FluidState, cap: f64) -> Result<(FluidState, StepReport)> {
        let (adv, visc) = self.stable_dt(state)?;
        let bound = self.dt_bound(adv, visc);
        let dt = if cap <= bound || !cap.is_finite() {
            bound.min(cap)
        } else {
            cap / (cap / bound).ceil()
        };
        self.advance(state, dt, adv, visc)
    }

    fn advance(&mut self, state: &FluidState, dt: f64, adv: f64, visc: f64) -> Result<(FluidState, StepReport)> {
        let n = self.grid.n_cells;
        let boundary = state.boundary;
        let far = self.far_density(boundary)?;
        let t = state.time;
        let law = self.law;
        let mut rho1 = vec![0.0; n];
        let mut u1 = vec![0.0; n];

        let reject = |reason: String| {
            let (lo, hi) = state.density_extrema();
            Ok((
                state.clone(),
                StepReport {
                    dt_used: dt,
                    advective_dt: adv,
                    viscous_dt: visc,
                    min_rho: lo,
                    max_rho: hi,
                    boundary_contamination: boundary_contamination(state, &law),
                    boundary_mass_outflow: 0.0,
                    step_accepted: false,
                    rejection: Some(reason),
                },
            ))
        };

        let flux0 = self.stage(&state.rho, &state.u, t, dt, boundary, far, &mut rho1, &mut u1);
        let (rho_new, u_new, outflow) = match self.scheme.integrator {
            TimeIntegrator::ForwardEuler => (rho1, u1, dt * flux0),
            TimeIntegrator::SspRk2 => {
                check_finite(&rho1, &u1, t)?;
                if let Some(i) = rho1.iter().position(|r| !(*r > 0.0)) {
                    return reject(format!("vacuum in first stage at cell {i} (rho = {:e})", rho1[i]));
                }
                let mut rho2 = vec![0.0; n];
                let mut u2 = vec![0.0; n];
                let flux1 = self.stage(&rho1, &u1, t + dt, dt, boundary, far, &mut rho2, &mut u2);
                for i in 0..n {
                    rho2[i] = 0.5 * (state.rho[i] + rho2[i]);
                    u2[i] = 0.5 * (state.u[i] + u2[i]);
                }
                (rho2, u2, 0.5 * dt * (flux0 + flux1))
            }
        };
        check_finite(&rho_new, &u_new, t)?;
        if let Some(i) = rho_new.iter().position(|r| !(*r > 0.0)) {
            return reject(format!("vacuum at cell {i} (rho = {:e})", rho_new[i]));
        }
        let next = FluidState {
            time: t + dt,
            rho: rho_new,
            u: u_new,
            boundary,
        };
        let (lo, hi) = next.density_extrema();
        let report = StepReport {
            dt_used: dt,
            advective_dt: adv,
            viscous_dt: visc,
            min_rho: lo,
            max_rho: hi,
            boundary_contamination: boundary_contamination(&next, &self.law),
            boundary_mass_outflow: outflow,
            step_accepted: true,
            rejection: None,
        };
        Ok((next, report))
    }
}

fn check_finite(rho: &[f64], u: &[f64], t: f64) -> Result<()> {
    if let Some(i) = rho.iter().zip(u).position(|(r, v)| !r.is_finite() || !v.is_finite()) {
        return Err(Error::NonFinite(format!(
            "cell {i} after step from t = {t}: rho = {}, u = {}",
            rho[i], u[i]
        )));
    }
    Ok(())
}

/// `(advective_dt, viscous_dt)`; see [`Stepper::stable_dt`].
pub fn stable_dt(state: &FluidState, grid: &RadialGrid, params: &ModelParams, scheme: &SchemeConfig) -> Result<(f64, f64)> {
    Stepper::new(grid, *params, *scheme)?.stable_dt(state)
}

/// One step with a fresh workspace; see [`Stepper::step`].
pub fn step(
    state: &FluidState,
    grid: &RadialGrid,
    params: &ModelParams,
    scheme: &SchemeConfig,
    dt: Option<f64>,
) -> Result<(FluidState, StepReport)> {
    if state.len() != grid.n_cells {
        return Err(Error::usage("state and grid sizes differ"));
    }
    Stepper::new(grid, *params, *scheme)?.step(state, dt)
}
