//! Energy and BD-entropy functionals, momentum moments and weighted norms,
//! plus the discrete residuals of the two balance laws
//!
//! ```text
//! d/dt ∫ (rho u²/2 + K) r^{N-1} = -alpha ∫ mu u_r² r^{N-1} - c_N ∫ mu u² r^{N-3}
//!                                 + 2 (N-1)(1-alpha) ∫ mu u u_r r^{N-2}
//! d/dt ∫ (rho w²/2 + K) r^{N-1} = -(a gamma / alpha) ∫ rho^{gamma-alpha-1} |(rho^alpha)_r|² r^{N-1}
//! ```
//!
//! with `mu = rho^alpha` and `c_N = alpha (N-1)² - (N-1)(N-2)`, i.e. `alpha`
//! in the plane and `4 alpha - 2` in space. All integrals run over
//! `(0, r_max)` with the exact cell measures.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{check_positive, FluidState, Parity, RadialGrid};
use crate::model::ConstitutiveSet;

/// Field entering a weighted norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormField {
    Rho,
    /// `rho - rho~`.
    RhoDeviation,
    DensityGradient,
    Velocity,
    EffectiveVelocity,
}

impl NormField {
    pub fn as_str(self) -> &'static str {
        match self {
            NormField::Rho => "rho",
            NormField::RhoDeviation => "rho_dev",
            NormField::DensityGradient => "rho_r",
            NormField::Velocity => "u",
            NormField::EffectiveVelocity => "w",
        }
    }
}

impl FromStr for NormField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "rho" => NormField::Rho,
            "rho_dev" => NormField::RhoDeviation,
            "rho_r" => NormField::DensityGradient,
            "u" => NormField::Velocity,
            "w" => NormField::EffectiveVelocity,
            other => {
                return Err(Error::usage(format!(
                    "unknown norm field '{other}', expected rho, rho_dev, rho_r, u or w"
                )))
            }
        })
    }
}

/// `(∫ |f|^p r^{xi p} r^{N-1} dr)^{1/p}` over the whole grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedNormSpec {
    pub field: NormField,
    pub p: f64,
    pub xi: f64,
}

impl WeightedNormSpec {
    /// Column tag, e.g. `rho_dev_p2_xi0.5` or `u_pinf_xi0`.
    pub fn tag(&self) -> String {
        let p = if self.p.is_infinite() { "inf".to_string() } else { format!("{}", self.p) };
        format!("{}_p{}_xi{}", self.field.as_str(), p, self.xi)
    }
}

impl fmt::Display for WeightedNormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = if self.p.is_infinite() { "inf".to_string() } else { format!("{}", self.p) };
        write!(f, "{}:{}:{}", self.field.as_str(), p, self.xi)
    }
}

impl FromStr for WeightedNormSpec {
    type Err = Error;

    /// `field:p:xi`, with `p = inf` for the sup norm.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        if parts.len() != 3 {
            return Err(Error::usage(format!("weighted norm '{s}' must look like field:p:xi")));
        }
        let field = parts[0].parse()?;
        let p = match parts[1] {
            "inf" => f64::INFINITY,
            v => v
                .parse::<f64>()
                .map_err(|_| Error::usage(format!("bad norm exponent '{v}'")))?,
        };
        let xi = parts[2]
            .parse::<f64>()
            .map_err(|_| Error::usage(format!("bad norm weight '{}'", parts[2])))?;
        if !(p >= 1.0) || !xi.is_finite() {
            return Err(Error::usage(format!("weighted norm '{s}' needs p >= 1 and finite xi")));
        }
        Ok(WeightedNormSpec { field, p, xi })
    }
}

/// Which optional functionals to evaluate.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiagnosticsConfig {
    pub k_moments: Vec<f64>,
    pub weighted_norms: Vec<WeightedNormSpec>,
}

impl DiagnosticsConfig {
    /// Norms in the weighted planar estimates: `|x|^{eta/2}` times
    /// `rho - rho~`, `rho_r` and `u`, in `L²` (the radial weight `r` is the
    /// planar measure).
    pub fn eta_weighted_norms(eta: f64) -> Vec<WeightedNormSpec> {
        [NormField::RhoDeviation, NormField::DensityGradient, NormField::Velocity]
            .into_iter()
            .map(|field| WeightedNormSpec { field, p: 2.0, xi: 0.5 * eta })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsSample {
    pub time: f64,
    /// Step size of the step used for the balance residuals.
    pub dt: f64,
    pub kinetic_energy: f64,
    pub potential_energy_total: f64,
    pub bd_kinetic: f64,
    pub bd_dissipation_rate: f64,
    pub energy_balance_residual: f64,
    pub bd_balance_residual: f64,
    /// Signed discrete derivative of `∫ (rho w²/2 + K)` over the step.
    pub bd_rate: f64,
    pub k_moments: Vec<(f64, f64)>,
    pub weighted_norms: Vec<(String, f64)>,
    pub min_rho: f64,
    pub max_rho: f64,
    pub grad_entropy_norm: f64,
    pub boundary_contamination: f64,
}

/// Balance-law bookkeeping over one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalanceReport {
    /// `(F_after - F_before) / dt` for the balanced functional `F`.
    pub rate: f64,
    /// Right-hand side of the identity at the midpoint state.
    pub expected_rate: f64,
    pub residual: f64,
}

fn check_pair(grid: &RadialGrid, before: &FluidState, after: &FluidState) -> Result<f64> {
    if before.len() != grid.n_cells || after.len() != grid.n_cells {
        return Err(Error::usage("states and grid have different sizes"));
    }
    let dt = after.time - before.time;
    if !(dt > 0.0) {
        return Err(Error::usage(format!(
            "balance residual needs increasing times, got {} -> {}",
            before.time, after.time
        )));
    }
    Ok(dt)
}

fn midpoint(a: &FluidState, b: &FluidState) -> FluidState {
    FluidState {
        time: 0.5 * (a.time + b.time),
        rho: a.rho.iter().zip(&b.rho).map(|(x, y)| 0.5 * (x + y)).collect(),
        u: a.u.iter().zip(&b.u).map(|(x, y)| 0.5 * (x + y)).collect(),
        boundary: a.boundary,
    }
}

/// `(∫ rho u²/2, ∫ K(rho))` with the radial measure.
pub fn total_energy(state: &FluidState, grid: &RadialGrid, law: &ConstitutiveSet) -> Result<(f64, f64)> {
    check_positive(&state.rho)?;
    let base = law.params.require_far_density()?;
    let kinetic: Vec<f64> = state.rho.iter().zip(&state.u).map(|(r, v)| 0.5 * r * v * v).collect();
    let potential: Vec<f64> = state
        .rho
        .iter()
        .map(|&r| law.potential_energy_unchecked(r, base))
        .collect();
    Ok((grid.integrate(&kinetic), grid.integrate(&potential)))
}

/// `∫ rho w²/2` with `w = u + alpha rho^{alpha-2} rho_r`.
pub fn bd_kinetic(state: &FluidState, grid: &RadialGrid, law: &ConstitutiveSet) -> Result<f64> {
    let w = law.effective_velocity(grid, &state.rho, &state.u)?;
    let density: Vec<f64> = state.rho.iter().zip(&w).map(|(r, v)| 0.5 * r * v * v).collect();
    Ok(grid.integrate(&density))
}

/// `(a gamma / alpha) ∫ rho^{gamma-alpha-1} |(rho^alpha)_r|²`.
pub fn bd_dissipation_rate(state: &FluidState, grid: &RadialGrid, law: &ConstitutiveSet) -> Result<f64> {
    check_positive(&state.rho)?;
    let p = &law.params;
    let mu: Vec<f64> = state.rho.iter().map(|r| r.powf(p.alpha)).collect();
    let dmu = grid.derivative(&mu, Parity::Even);
    let density: Vec<f64> = state
        .rho
        .iter()
        .zip(&dmu)
        .map(|(r, d)| r.powf(p.gamma - p.alpha - 1.0) * d * d)
        .collect();
    Ok(p.pressure_coeff * p.gamma / p.alpha * grid.integrate(&density))
}

/// `(dissipation, production)` of the energy identity at one state.
pub fn energy_dissipation(state: &FluidState, grid: &RadialGrid, law: &ConstitutiveSet) -> Result<(f64, f64)> {
    check_positive(&state.rho)?;
    let alpha = law.params.alpha;
    let n1 = (grid.dim - 1) as f64;
    let c_n = alpha * n1 * n1 - n1 * (n1 - 1.0);
    let du = grid.derivative(&state.u, Parity::Odd);
    let mut diss = vec![0.0; grid.n_cells];
    let mut prod = vec![0.0; grid.n_cells];
    for i in 0..grid.n_cells {
        let mu = state.rho[i].powf(alpha);
        let (u, r) = (state.u[i], grid.centers[i]);
        diss[i] = mu * (alpha * du[i] * du[i] + c_n * u * u / (r * r));
        prod[i] = 2.0 * n1 * (1.0 - alpha) * mu * u * du[i] / r;
    }
    Ok((grid.integrate(&diss), grid.integrate(&prod)))
}

/// Energy identity over one step: the rate of `∫ (rho u²/2 + K)` against
/// `production - dissipation` at the midpoint state.
pub fn energy_balance(
    before: &FluidState,
    after: &FluidState,
    grid: &RadialGrid,
    law: &ConstitutiveSet,
) -> Result<BalanceReport> {
    let dt = check_pair(grid, before, after)?;
    let (k0, p0) = total_energy(before, grid, law)?;
    let (k1, p1) = total_energy(after, grid, law)?;
    let rate = ((k1 - k0) + (p1 - p0)) / dt;
    let (diss, prod) = energy_dissipation(&midpoint(before, after), grid, law)?;
    let expected_rate = prod - diss;
    Ok(BalanceReport { rate, expected_rate, residual: (rate - expected_rate).abs() })
}

pub fn energy_balance_residual(
    before: &FluidState,
    after: &FluidState,
    grid: &RadialGrid,
    law: &ConstitutiveSet,
) -> Result<f64> {
    Ok(energy_balance(before, after, grid, law)?.residual)
}

/// `∫ (rho w²/2 + K)`.
pub fn bd_functional(state: &FluidState, grid: &RadialGrid, law: &ConstitutiveSet) -> Result<f64> {
    Ok(bd_kinetic(state, grid, law)? + total_energy(state, grid, law)?.1)
}

/// BD entropy identity over one step; `rate` is the signed derivative.
pub fn bd_entropy_balance(
    before: &FluidState,
    after: &FluidState,
    grid: &RadialGrid,
    law: &ConstitutiveSet,
) -> Result<BalanceReport> {
    let dt = check_pair(grid, before, after)?;
    let rate = (bd_functional(after, grid, law)? - bd_functional(before, grid, law)?) / dt;
    let expected_rate = -bd_dissipation_rate(&midpoint(before, after), grid, law)?;
    Ok(BalanceReport { rate, expected_rate, residual: (rate - expected_rate).abs() })
}

pub fn bd_entropy_balance_residual(
    before: &FluidState,
    after: &FluidState,
    grid: &RadialGrid,
    law: &ConstitutiveSet,
) -> Result<f64> {
    Ok(bd_entropy_balance(before, after, grid, law)?.residual)
}

/// `∫ rho |u|^k`, for `k >= 2`.
pub fn k_moment(state: &FluidState, grid: &RadialGrid, k: f64) -> Result<f64> {
    if !(k >= 2.0) || !k.is_finite() {
        return Err(Error::usage(format!("moment exponent must be a finite k >= 2, got {k}")));
    }
    let density: Vec<f64> = state.rho.iter().zip(&state.u).map(|(r, v)| r * v.abs().powf(k)).collect();
    Ok(grid.integrate(&density))
}

/// `∫ |(rho^{alpha - 1/2})_r|² r^{N-1+xi}`.
pub fn entropy_gradient_norm(state: &FluidState, grid: &RadialGrid, law: &ConstitutiveSet, xi: f64) -> Result<f64> {
    check_positive(&state.rho)?;
    let e = law.params.alpha - 0.5;
    let q: Vec<f64> = state.rho.iter().map(|r| r.powf(e)).collect();
    let dq = grid.derivative(&q, Parity::Even);
    let density: Vec<f64> = dq.iter().zip(&grid.centers).map(|(d, r)| d * d * r.powf(xi)).collect();
    Ok(grid.integrate(&density))
}

pub fn density_extrema(state: &FluidState) -> (f64, f64) {
    state.density_extrema()
}

pub fn weighted_norm(
    state: &FluidState,
    grid: &RadialGrid,
    law: &ConstitutiveSet,
    spec: &WeightedNormSpec,
) -> Result<f64> {
    let field: Vec<f64> = match spec.field {
        NormField::Rho => state.rho.clone(),
        NormField::RhoDeviation => {
            let base = law.params.require_far_density()?;
            state.rho.iter().map(|r| r - base).collect()
        }
        NormField::DensityGradient => grid.derivative(&state.rho, Parity::Even),
        NormField::Velocity => state.u.clone(),
        NormField::EffectiveVelocity => law.effective_velocity(grid, &state.rho, &state.u)?,
    };
    grid.weighted_lp_norm(&field, spec.p, spec.xi, (0.0, grid.r_max))
}

/// All functionals at `state`, with balance residuals from the step
/// `state_prev -> state`.
pub fn sample_all(
    state_prev: &FluidState,
    state: &FluidState,
    grid: &RadialGrid,
    law: &ConstitutiveSet,
    config: &DiagnosticsConfig,
) -> Result<DiagnosticsSample> {
    sample_with_step(state, state_prev, state, grid, law, config)
}

/// Functionals at `at`, with balance residuals from the step
/// `before -> after`. Used for the initial sample, whose residuals come
/// from the first step.
pub fn sample_with_step(
    at: &FluidState,
    before: &FluidState,
    after: &FluidState,
    grid: &RadialGrid,
    law: &ConstitutiveSet,
    config: &DiagnosticsConfig,
) -> Result<DiagnosticsSample> {
    let (kinetic_energy, potential_energy_total) = total_energy(at, grid, law)?;
    let energy = energy_balance(before, after, grid, law)?;
    let bd = bd_entropy_balance(before, after, grid, law)?;
    let k_moments = config
        .k_moments
        .iter()
        .map(|&k| Ok((k, k_moment(at, grid, k)?)))
        .collect::<Result<Vec<_>>>()?;
    let weighted_norms = config
        .weighted_norms
        .iter()
        .map(|spec| Ok((spec.tag(), weighted_norm(at, grid, law, spec)?)))
        .collect::<Result<Vec<_>>>()?;
    let (min_rho, max_rho) = at.density_extrema();
    Ok(DiagnosticsSample {
        time: at.time,
        dt: after.time - before.time,
        kinetic_energy,
        potential_energy_total,
        bd_kinetic: bd_kinetic(at, grid, law)?,
        bd_dissipation_rate: bd_dissipation_rate(at, grid, law)?,
        energy_balance_residual: energy.residual,
        bd_balance_residual: bd.residual,
        bd_rate: bd.rate,
        k_moments,
        weighted_norms,
        min_rho,
        max_rho,
        grad_entropy_norm: entropy_gradient_norm(at, grid, law, 0.0)?,
        boundary_contamination: boundary_contamination(at, law),
    })
}

/// Largest of `|rho - rho~| / rho~` and `|u| / c~` over the outer 5% of
/// cells; zero without a far-field density.
pub fn boundary_contamination(state: &FluidState, law: &ConstitutiveSet) -> f64 {
    let Some(far) = law.params.far_density else {
        return 0.0;
    };
    let n = state.len();
    let width = (n / 20).max(1);
    let c = law.sound_speed(far);
    let c = if c > 0.0 { c } else { 1.0 };
    (n - width..n)
        .map(|i| ((state.rho[i] - far).abs() / far).max(state.u[i].abs() / c))
        .fold(0.0, f64::max)
}
