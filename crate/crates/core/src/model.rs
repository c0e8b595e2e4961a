//! Constitutive laws and pointwise residuals of the radial system
//!
//! ```text
//! rho_t + (rho u)_r + (N-1) rho u / r = 0
//! rho (u_t + u u_r) + P_r - alpha (r^{-(N-1)} rho^alpha (r^{N-1} u)_r)_r
//!     + (N-1) (rho^alpha)_r u / r = 0
//! ```
//!
//! with `P = a rho^gamma`, `mu = rho^alpha` and `lambda = (alpha - 1) rho^alpha`.
//! Derivatives use [`RadialGrid::derivative`], so every residual here is
//! second-order accurate in `dr` for smooth fields.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{check_positive, FluidState, Parity, RadialGrid};
use crate::params::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstitutiveSet {
    pub params: ModelParams,
}

fn positive(rho: f64) -> Result<()> {
    if rho > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("density must be positive, got {rho}")))
    }
}

impl ConstitutiveSet {
    pub fn new(params: ModelParams) -> Self {
        ConstitutiveSet { params }
    }

    pub fn pressure(&self, rho: f64) -> Result<f64> {
        positive(rho)?;
        Ok(self.pressure_unchecked(rho))
    }

    #[inline]
    pub(crate) fn pressure_unchecked(&self, rho: f64) -> f64 {
        self.params.pressure_coeff * rho.powf(self.params.gamma)
    }

    /// `(mu, lambda) = (rho^alpha, (alpha - 1) rho^alpha)`.
    pub fn viscosities(&self, rho: f64) -> Result<(f64, f64)> {
        positive(rho)?;
        let mu = rho.powf(self.params.alpha);
        Ok((mu, (self.params.alpha - 1.0) * mu))
    }

    /// `mu'(rho) = alpha rho^{alpha - 1}`.
    pub fn shear_derivative(&self, rho: f64) -> Result<f64> {
        positive(rho)?;
        Ok(self.params.alpha * rho.powf(self.params.alpha - 1.0))
    }

    /// `c = sqrt(a gamma rho^{gamma - 1})`.
    pub fn sound_speed(&self, rho: f64) -> f64 {
        (self.params.pressure_coeff * self.params.gamma * rho.powf(self.params.gamma - 1.0)).sqrt()
    }

    /// Potential energy density relative to the far-field state,
    /// `K(rho) = rho ∫_{rho~}^{rho} (P(s) - P(rho~)) / s^2 ds`, in closed form
    /// `a [(rho^gamma - gamma rho rho~^{gamma-1}) / (gamma - 1) + rho~^gamma]`.
    pub fn potential_energy(&self, rho: f64) -> Result<f64> {
        if !(rho >= 0.0) {
            return Err(Error::domain(format!("density must be nonnegative, got {rho}")));
        }
        let base = self.params.require_far_density()?;
        Ok(self.potential_energy_unchecked(rho, base))
    }

    #[inline]
    pub(crate) fn potential_energy_unchecked(&self, rho: f64, base: f64) -> f64 {
        let g = self.params.gamma;
        if rho == base {
            return 0.0;
        }
        let k = (rho.powf(g) - g * rho * base.powf(g - 1.0)) / (g - 1.0) + base.powf(g);
        // the closed form is a difference of O(1) terms; clamp the rounding
        // error that can make it marginally negative near rho = rho~
        self.params.pressure_coeff * k.max(0.0)
    }

    /// `w = u + rho^{-1} (rho^alpha)_r = u + alpha rho^{alpha-2} rho_r`.
    pub fn effective_velocity(&self, grid: &RadialGrid, rho: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        check_positive(rho)?;
        same_len(grid, rho)?;
        same_len(grid, u)?;
        let a = self.params.alpha;
        let drho = grid.derivative(rho, Parity::Even);
        Ok(u.iter()
            .zip(rho)
            .zip(&drho)
            .map(|((&v, &r), &d)| v + a * r.powf(a - 2.0) * d)
            .collect())
    }

    /// Residual of the continuity equation for a candidate `rho_t`.
    pub fn mass_residual(&self, grid: &RadialGrid, state: &FluidState, d_rho_dt: &[f64]) -> Result<Vec<f64>> {
        same_len(grid, &state.rho)?;
        same_len(grid, &state.u)?;
        same_len(grid, d_rho_dt)?;
        let n1 = (grid.dim - 1) as f64;
        let flux: Vec<f64> = state.rho.iter().zip(&state.u).map(|(r, v)| r * v).collect();
        let dflux = grid.derivative(&flux, Parity::Odd);
        Ok((0..grid.n_cells)
            .map(|i| d_rho_dt[i] + dflux[i] + n1 * flux[i] / grid.centers[i])
            .collect())
    }

    /// Residual of the momentum equation for a candidate `u_t`, with the
    /// viscous term in the grouped form `alpha (r^{-(N-1)} mu (r^{N-1} u)_r)_r`.
    pub fn momentum_residual(&self, grid: &RadialGrid, state: &FluidState, d_u_dt: &[f64]) -> Result<Vec<f64>> {
        check_positive(&state.rho)?;
        same_len(grid, &state.rho)?;
        same_len(grid, &state.u)?;
        same_len(grid, d_u_dt)?;
        let p = &self.params;
        let n1 = grid.dim - 1;
        let (rho, u) = (&state.rho, &state.u);

        let du = grid.derivative(u, Parity::Odd);
        let pressure: Vec<f64> = rho.iter().map(|&r| self.pressure_unchecked(r)).collect();
        let dp = grid.derivative(&pressure, Parity::Even);
        let mu: Vec<f64> = rho.iter().map(|r| r.powf(p.alpha)).collect();
        let dmu = grid.derivative(&mu, Parity::Even);

        // D = r^{-(N-1)} mu (r^{N-1} u)_r = mu (u_r + (N-1) u / r) is even
        let grouped: Vec<f64> = (0..grid.n_cells)
            .map(|i| mu[i] * (du[i] + n1 as f64 * u[i] / grid.centers[i]))
            .collect();
        let dgrouped = grid.derivative(&grouped, Parity::Even);

        Ok((0..grid.n_cells)
            .map(|i| {
                rho[i] * (d_u_dt[i] + u[i] * du[i]) + dp[i] - p.alpha * dgrouped[i]
                    + n1 as f64 * dmu[i] * u[i] / grid.centers[i]
            })
            .collect())
    }

    /// Residual of the effective-velocity equation in the chosen form.
    pub fn effective_velocity_residual(
        &self,
        grid: &RadialGrid,
        state: &FluidState,
        w: &[f64],
        d_w_dt: &[f64],
        form: EffectiveVelocityForm,
    ) -> Result<Vec<f64>> {
        check_positive(&state.rho)?;
        same_len(grid, w)?;
        same_len(grid, d_w_dt)?;
        let p = &self.params;
        let (rho, u) = (&state.rho, &state.u);
        let dw = grid.derivative(w, Parity::Odd);
        let forcing: Vec<f64> = match form {
            EffectiveVelocityForm::Transport => {
                let pressure: Vec<f64> = rho.iter().map(|&r| self.pressure_unchecked(r)).collect();
                grid.derivative(&pressure, Parity::Even)
            }
            EffectiveVelocityForm::Damped => {
                let coeff = p.pressure_coeff * p.gamma / p.alpha;
                (0..grid.n_cells)
                    .map(|i| coeff * rho[i].powf(p.gamma + 1.0 - p.alpha) * (w[i] - u[i]))
                    .collect()
            }
        };
        Ok((0..grid.n_cells)
            .map(|i| rho[i] * d_w_dt[i] + rho[i] * u[i] * dw[i] + forcing[i])
            .collect())
    }
}

fn same_len(grid: &RadialGrid, field: &[f64]) -> Result<()> {
    if field.len() != grid.n_cells {
        return Err(Error::usage(format!(
            "field has {} entries, grid has {} cells",
            field.len(),
            grid.n_cells
        )));
    }
    Ok(())
}

/// Two equivalent forms of the effective-velocity equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EffectiveVelocityForm {
    /// `rho w_t + rho u w_r + P_r = 0`.
    Transport,
    /// `rho w_t + rho u w_r + (a gamma / alpha) rho^{gamma+1-alpha} (w - u) = 0`.
    Damped,
}

impl FromStr for EffectiveVelocityForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "transport" | "A" => Ok(EffectiveVelocityForm::Transport),
            "damped" | "B" => Ok(EffectiveVelocityForm::Damped),
            other => Err(Error::usage(format!("unknown effective-velocity form '{other}'"))),
        }
    }
}

impl fmt::Display for EffectiveVelocityForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EffectiveVelocityForm::Transport => "transport",
            EffectiveVelocityForm::Damped => "damped",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use crate::solver::Boundary;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn set(dim: usize, alpha: f64, gamma: f64) -> ConstitutiveSet {
        ConstitutiveSet::new(ModelParams::new(dim, alpha, gamma, Some(1.0)).unwrap())
    }

    #[test]
    fn pressure_examples() {
        assert_eq!(set(2, 0.7, 2.0).pressure(1.0).unwrap(), 1.0);
        assert_eq!(set(2, 0.7, 2.0).pressure(3.0).unwrap(), 9.0);
        assert_abs_diff_eq!(set(2, 0.7, 1.4).pressure(2.0).unwrap(), 2.639016, epsilon = 1e-6);
        assert!(set(2, 0.7, 2.0).pressure(0.0).is_err());
    }

    #[test]
    fn viscosity_examples() {
        assert_eq!(set(2, 1.0, 2.0).viscosities(5.0).unwrap(), (5.0, 0.0));
        let (mu, lambda) = set(3, 0.7, 2.0).viscosities(1.0).unwrap();
        assert_eq!(mu, 1.0);
        assert_abs_diff_eq!(lambda, -0.3, epsilon = 1e-15);
        assert!(set(3, 0.7, 2.0).viscosities(-1.0).is_err());
    }

    #[test]
    fn bd_relation_holds() {
        for alpha in [0.55, 0.7, 0.9] {
            let c = set(2, alpha, 2.0);
            for e in -3..=3 {
                let rho = 10f64.powi(e);
                let (mu, lambda) = c.viscosities(rho).unwrap();
                let bd = c.shear_derivative(rho).unwrap() * rho - mu;
                assert_relative_eq!(bd, lambda, max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn potential_energy_examples() {
        let c = set(2, 0.7, 2.0);
        assert_eq!(c.potential_energy(1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(c.potential_energy(2.0).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c.potential_energy(1e-9).unwrap(), 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(c.potential_energy(0.0).unwrap(), 1.0, epsilon = 1e-15);
        assert!(c.potential_energy(-0.1).is_err());
        let no_base = ConstitutiveSet::new(ModelParams::new(2, 0.7, 2.0, None).unwrap());
        assert!(matches!(no_base.potential_energy(1.0), Err(Error::Usage(_))));
    }

    #[test]
    fn potential_energy_nonnegative_and_convex() {
        for gamma in [1.2, 2.0, 3.0] {
            let c = set(3, 0.7, gamma);
            let rhos: Vec<f64> = (0..200).map(|i| 10f64.powf(-3.0 + 5.0 * i as f64 / 199.0)).collect();
            let k: Vec<f64> = rhos.iter().map(|&r| c.potential_energy(r).unwrap()).collect();
            assert!(k.iter().all(|&v| v >= 0.0));
            // second divided differences on a nonuniform grid
            for j in 1..rhos.len() - 1 {
                let (x0, x1, x2) = (rhos[j - 1], rhos[j], rhos[j + 1]);
                let s1 = (k[j] - k[j - 1]) / (x1 - x0);
                let s2 = (k[j + 1] - k[j]) / (x2 - x1);
                assert!(s2 - s1 >= -1e-9 * s1.abs().max(1.0), "gamma {gamma} rho {x1}");
            }
        }
    }

    #[test]
    fn effective_velocity_constant_density_is_u() {
        let g = build_grid(32, 2.0, 3).unwrap();
        let c = set(3, 0.7, 1.1);
        let rho = vec![1.0; 32];
        let u: Vec<f64> = g.centers.iter().map(|r| r.sin()).collect();
        assert_eq!(c.effective_velocity(&g, &rho, &u).unwrap(), u);
        assert!(c.effective_velocity(&g, &[0.0; 32], &u).is_err());
    }

    #[test]
    fn effective_velocity_analytic_profiles() {
        // rho = e^{-r}, alpha = 0.7: w = -alpha e^{(1 - alpha) r}, so w(1) = -0.7 e^{0.3}
        let c = set(3, 0.7, 1.1);
        let mut errs = Vec::new();
        for n in [200usize, 400] {
            let g = build_grid(n, 2.0, 3).unwrap();
            let rho: Vec<f64> = g.centers.iter().map(|r| (-r).exp()).collect();
            let w = c.effective_velocity(&g, &rho, &vec![0.0; n]).unwrap();
            // cells n/2 - 1 and n/2 straddle r = 1
            let at_one = 0.5 * (w[n / 2 - 1] + w[n / 2]);
            errs.push((at_one - (-0.7 * 0.3f64.exp())).abs());
        }
        assert!(errs[0] < 1e-3 && errs[0] / errs[1] > 3.5, "{errs:?}");
        assert_abs_diff_eq!(-0.7 * 0.3f64.exp(), -0.944901, epsilon = 1e-6);

        // rho = 1 + r^2, alpha = 1/2: w = r (1 + r^2)^{-3/2}
        let c = ConstitutiveSet::new(ModelParams::new(2, 0.5, 1.1, Some(1.0)).unwrap());
        let g = build_grid(400, 2.0, 2).unwrap();
        let rho: Vec<f64> = g.centers.iter().map(|r| 1.0 + r * r).collect();
        let w = c.effective_velocity(&g, &rho, &vec![0.0; 400]).unwrap();
        for (wi, r) in w.iter().zip(&g.centers) {
            assert_abs_diff_eq!(*wi, r * (1.0 + r * r).powf(-1.5), epsilon = 1e-12);
        }
        assert_abs_diff_eq!(2f64.powf(-1.5), 0.353553, epsilon = 1e-6);
    }

    #[test]
    fn residuals_vanish_on_constant_state() {
        let g = build_grid(64, 4.0, 3).unwrap();
        let c = set(3, 0.7, 1.1);
        let s = FluidState::constant(&g, 1.0, Boundary::FarField).unwrap();
        let z = vec![0.0; 64];
        assert!(c.mass_residual(&g, &s, &z).unwrap().iter().all(|&v| v == 0.0));
        assert!(c.momentum_residual(&g, &s, &z).unwrap().iter().all(|&v| v == 0.0));
        let w = c.effective_velocity(&g, &s.rho, &s.u).unwrap();
        for form in [EffectiveVelocityForm::Transport, EffectiveVelocityForm::Damped] {
            let res = c.effective_velocity_residual(&g, &s, &w, &z, form).unwrap();
            assert!(res.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn steady_transport_has_zero_mass_residual() {
        // rho = 1, u = c / r^{N-1} is divergence free; check on [1, 2]
        for dim in [2usize, 3] {
            let err = |n: usize| {
                let g = build_grid(n, 2.0, dim).unwrap();
                let u: Vec<f64> = g.centers.iter().map(|r| 0.3 / r.powi(dim as i32 - 1)).collect();
                let s = FluidState::new(0.0, vec![1.0; n], u, Boundary::FarField).unwrap();
                let res = set(dim, 0.8, 1.5).mass_residual(&g, &s, &vec![0.0; n]).unwrap();
                g.centers
                    .iter()
                    .zip(&res)
                    .filter(|(r, _)| **r > 1.0 && **r < 1.95)
                    .map(|(_, v)| v.abs())
                    .fold(0.0, f64::max)
            };
            let ratio = err(200) / err(400);
            assert!(ratio > 3.5, "dim {dim}: ratio {ratio}");
        }
    }

    #[test]
    fn hydrostatic_momentum_residual_is_pressure_gradient() {
        let g = build_grid(128, 3.0, 3).unwrap();
        let c = set(3, 0.7, 1.4);
        let rho: Vec<f64> = g.centers.iter().map(|r| 1.0 + 0.3 * (-r * r).exp()).collect();
        let s = FluidState::new(0.0, rho.clone(), vec![0.0; 128], Boundary::FarField).unwrap();
        let res = c.momentum_residual(&g, &s, &vec![0.0; 128]).unwrap();
        let p: Vec<f64> = rho.iter().map(|&r| c.pressure(r).unwrap()).collect();
        let dp = g.derivative(&p, Parity::Even);
        for (a, b) in res.iter().zip(&dp) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-13);
        }
    }

    #[test]
    fn unknown_form_tag() {
        assert!("C".parse::<EffectiveVelocityForm>().is_err());
        assert_eq!("B".parse::<EffectiveVelocityForm>().unwrap(), EffectiveVelocityForm::Damped);
    }
}
