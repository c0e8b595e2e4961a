//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Three operations are exposed: the threshold table, an admissibility check
//! (pointwise and as a map over the `(alpha, gamma)` plane) and a
//! [`Simulation`] that can be advanced and plotted frame by frame.

use radial_ns::diagnostics::{bd_functional, total_energy};
use radial_ns::grid::make_initial_data;
use radial_ns::model::ConstitutiveSet;
use radial_ns::params::{alpha_lower_bound, check_admissibility, root_k1, root_k2};
use radial_ns::solver::Stepper;
use radial_ns::{Boundary, FluidState, InitialDataSpec, ModelParams, RadialGrid, Regime, SchemeConfig};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

/// The exact thresholds as JSON.
#[wasm_bindgen]
pub fn thresholds() -> String {
    let (k1, k2) = (root_k1(), root_k2());
    json!({
        "k1": k1,
        "k2": k2,
        "alpha_min_2d": 1.0 - 2.0 / k1,
        "alpha_min_2d_weighted": 9.0 - 6.0 * std::f64::consts::SQRT_2,
        "alpha_min_3d": 1.0 - 1.0 / k2,
    })
    .to_string()
}

fn regime_from(name: &str) -> Result<Regime, JsError> {
    name.parse().map_err(js_err)
}

/// Admissibility report for one parameter point, as JSON. `eta` is ignored
/// outside the weighted planar regime.
#[wasm_bindgen]
pub fn admissibility(regime: &str, alpha: f64, gamma: f64, eta: f64) -> Result<String, JsError> {
    let regime = regime_from(regime)?;
    let params = ModelParams::new(regime.dim(), alpha, gamma, Some(1.0)).map_err(js_err)?;
    let eta = (regime == Regime::Cauchy2dWeighted).then_some(eta);
    let report = check_admissibility(&params, regime, eta).map_err(js_err)?;
    serde_json::to_string(&report).map_err(js_err)
}

/// Row-major `n_gamma x n_alpha` map over `alpha in (alpha_lo, 1)` and
/// `gamma in (1, gamma_hi)`: 1 admissible, 0 not, -1 outside the model.
#[wasm_bindgen]
pub fn admissibility_map(regime: &str, n_alpha: usize, n_gamma: usize, gamma_hi: f64) -> Result<Vec<i8>, JsError> {
    let regime = regime_from(regime)?;
    let eta = (regime == Regime::Cauchy2dWeighted).then_some(0.5);
    let alpha_lo = 0.5;
    let mut cells = Vec::with_capacity(n_alpha * n_gamma);
    for j in 0..n_gamma {
        let gamma = 1.0 + (gamma_hi - 1.0) * (j as f64 + 0.5) / n_gamma as f64;
        for i in 0..n_alpha {
            let alpha = alpha_lo + (1.0 - alpha_lo) * (i as f64 + 0.5) / n_alpha as f64;
            let cell = match ModelParams::new(regime.dim(), alpha, gamma, Some(1.0)) {
                Ok(p) => match check_admissibility(&p, regime, eta) {
                    Ok(r) if r.admissible => 1,
                    Ok(_) => 0,
                    Err(_) => -1,
                },
                Err(_) => -1,
            };
            cells.push(cell);
        }
    }
    Ok(cells)
}

/// Lower `alpha` bound of a regime.
#[wasm_bindgen]
pub fn alpha_threshold(regime: &str) -> Result<f64, JsError> {
    Ok(alpha_lower_bound(regime_from(regime)?))
}

#[wasm_bindgen]
pub struct Simulation {
    grid: RadialGrid,
    params: ModelParams,
    state: FluidState,
    initial_mass: f64,
    steps: usize,
}

#[wasm_bindgen]
impl Simulation {
    /// A density bump of relative `amplitude` and `width` about the origin
    /// with an outward velocity pulse, on `n_cells` cells of `[0, r_max]`.
    #[wasm_bindgen(constructor)]
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        dim: usize,
        alpha: f64,
        gamma: f64,
        n_cells: usize,
        r_max: f64,
        amplitude: f64,
        width: f64,
        velocity_amplitude: f64,
        wall: bool,
    ) -> Result<Simulation, JsError> {
        let params = ModelParams::new(dim, alpha, gamma, Some(1.0)).map_err(js_err)?;
        let grid = RadialGrid::new(n_cells, r_max, dim).map_err(js_err)?;
        let boundary = if wall { Boundary::Wall } else { Boundary::FarField };
        let spec = InitialDataSpec::gaussian(amplitude, 0.0, width).with_velocity(velocity_amplitude, width);
        let (state, _) = make_initial_data(&spec, &grid, &params, boundary).map_err(js_err)?;
        let initial_mass = state.total_mass(&grid);
        Ok(Simulation { grid, params, state, initial_mass, steps: 0 })
    }

    /// Integrate for `duration`, taking at most `max_steps` steps. Returns
    /// the number of steps taken.
    pub fn advance(&mut self, duration: f64, max_steps: usize) -> Result<usize, JsError> {
        let mut stepper = Stepper::new(&self.grid, self.params, SchemeConfig::default()).map_err(js_err)?;
        let target = self.state.time + duration;
        let mut taken = 0;
        while taken < max_steps && self.state.time < target {
            let (next, report) = stepper.step_capped(&self.state, target - self.state.time).map_err(js_err)?;
            if !report.step_accepted {
                return Err(JsError::new(&report.rejection.unwrap_or_default()));
            }
            self.state = next;
            taken += 1;
        }
        self.steps += taken;
        Ok(taken)
    }

    pub fn time(&self) -> f64 {
        self.state.time
    }

    pub fn r(&self) -> Vec<f64> {
        self.grid.centers.clone()
    }

    pub fn rho(&self) -> Vec<f64> {
        self.state.rho.clone()
    }

    pub fn u(&self) -> Vec<f64> {
        self.state.u.clone()
    }

    pub fn w(&self) -> Result<Vec<f64>, JsError> {
        ConstitutiveSet::new(self.params)
            .effective_velocity(&self.grid, &self.state.rho, &self.state.u)
            .map_err(js_err)
    }

    /// Energies, the BD functional and mass drift as JSON.
    pub fn diagnostics(&self) -> Result<String, JsError> {
        let law = ConstitutiveSet::new(self.params);
        let (kinetic, potential) = total_energy(&self.state, &self.grid, &law).map_err(js_err)?;
        let bd = bd_functional(&self.state, &self.grid, &law).map_err(js_err)?;
        let (min_rho, max_rho) = self.state.density_extrema();
        let mass = self.state.total_mass(&self.grid);
        Ok(json!({
            "time": self.state.time,
            "steps": self.steps,
            "kinetic": kinetic,
            "potential": potential,
            "bd_functional": bd,
            "min_rho": min_rho,
            "max_rho": max_rho,
            "mass_drift": (mass - self.initial_mass) / self.initial_mass,
        })
        .to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds_json() {
        let v: serde_json::Value = serde_json::from_str(&thresholds()).unwrap();
        assert!((v["alpha_min_3d"].as_f64().unwrap() - 0.6766049821).abs() < 1e-10);
    }

    #[test]
    fn map_matches_pointwise_check() {
        let map = admissibility_map("cauchy-3d", 20, 10, 2.0).unwrap();
        assert_eq!(map.len(), 200);
        // alpha = 0.9875, gamma = 1.05 is inside the 3d window
        assert_eq!(map[19], 1);
        // alpha = 0.5125 is below the viscosity constraint in 3d
        assert_eq!(map[0], -1);
        let report: serde_json::Value =
            serde_json::from_str(&admissibility("cauchy-3d", 0.9875, 1.05, 0.0).unwrap()).unwrap();
        assert_eq!(report["admissible"], true);
    }

    #[test]
    fn simulation_advances_and_keeps_mass_in_a_ball() {
        let mut sim = Simulation::new(3, 0.7, 1.1, 64, 4.0, 0.3, 0.8, 0.2, true).unwrap();
        let taken = sim.advance(0.01, 10_000).unwrap();
        assert!(taken > 0);
        assert!((sim.time() - 0.01).abs() < 1e-15);
        let d: serde_json::Value = serde_json::from_str(&sim.diagnostics().unwrap()).unwrap();
        assert!(d["mass_drift"].as_f64().unwrap().abs() < 1e-12);
        assert_eq!(sim.w().unwrap().len(), 64);
    }
}
