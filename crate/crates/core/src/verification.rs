//! Independent oracles: manufactured solutions, adaptive Simpson quadrature
//! and a sixth-order difference stencil, plus the grid-convergence study.

use std::fmt;

use crate::error::{Error, Result};
use crate::grid::{FluidState, RadialGrid};
use crate::params::ModelParams;
use crate::solver::{Advection, Boundary, SchemeConfig, SourceTerms, Stepper};

/// Manufactured pair
///
/// ```text
/// rho*(r, t) = rho~ + A e^{-t} e^{-r²}
/// u*(r, t)   = B t r e^{-r²}
/// ```
///
/// Both are smooth and have the right parity at the origin, and they relax
/// to the far-field state fast enough for a Dirichlet boundary at a
/// moderate radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedCase {
    pub params: ModelParams,
    pub density_amplitude: f64,
    pub velocity_amplitude: f64,
    pub r_max: f64,
    pub t_end: f64,
}

impl ManufacturedCase {
    /// The default case: `N = 3`, `alpha = 0.7`, `gamma = 1.1`. The velocity
    /// is strong enough that the advective error dominates the viscous one on
    /// coarse grids, so a first-order scheme shows its order at 128 cells.
    pub fn builtin() -> Self {
        ManufacturedCase {
            params: ModelParams::new(3, 0.7, 1.1, Some(1.0)).expect("valid builtin parameters"),
            density_amplitude: 0.3,
            velocity_amplitude: 4.0,
            r_max: 6.0,
            t_end: 1.0,
        }
    }

    /// `A = B = 0`: the exact solution is the far-field state.
    pub fn constant() -> Self {
        ManufacturedCase {
            density_amplitude: 0.0,
            velocity_amplitude: 0.0,
            ..Self::builtin()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let base = self.params.require_far_density()?;
        // rho* >= rho~ - |A| on t >= 0
        if self.density_amplitude < -0.5 * base {
            return Err(Error::usage(format!(
                "manufactured density amplitude {} lets rho* fall below rho~/2",
                self.density_amplitude
            )));
        }
        if !(self.r_max > 0.0 && self.t_end > 0.0) {
            return Err(Error::usage("manufactured case needs positive r_max and t_end"));
        }
        Ok(())
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(t >= 0.0 && t <= self.t_end * (1.0 + 1e-12)) {
            return Err(Error::domain(format!(
                "time {t} outside the manufactured window [0, {}]",
                self.t_end
            )));
        }
        Ok(())
    }

    pub fn density(&self, r: f64, t: f64) -> f64 {
        self.params.far_density.unwrap_or(1.0) + self.density_amplitude * (-t).exp() * (-r * r).exp()
    }

    pub fn velocity(&self, r: f64, t: f64) -> f64 {
        self.velocity_amplitude * t * r * (-r * r).exp()
    }

    /// Hand-derived `(S_mass, S_mom)` at one point.
    pub fn source_at(&self, r: f64, t: f64) -> (f64, f64) {
        let p = &self.params;
        let n = p.dim as f64;
        let (a, b) = (self.density_amplitude, self.velocity_amplitude);
        let e = (-r * r).exp();
        let d = (-t).exp();

        let rho = self.density(r, t);
        let rho_t = -a * d * e;
        let rho_r = -2.0 * r * a * d * e;
        let u = b * t * r * e;
        let u_t = b * r * e;
        let u_r = b * t * e * (1.0 - 2.0 * r * r);
        let u_over_r = b * t * e;
        // theta = r^{-(N-1)} (r^{N-1} u)_r
        let theta = b * t * e * (n - 2.0 * r * r);
        let theta_r = -2.0 * r * b * t * e * (n + 2.0 - 2.0 * r * r);
        let mu = rho.powf(p.alpha);
        let mu_r = p.alpha * rho.powf(p.alpha - 1.0) * rho_r;
        let p_r = p.pressure_coeff * p.gamma * rho.powf(p.gamma - 1.0) * rho_r;

        let s_mass = rho_t + rho_r * u + rho * theta;
        let s_mom = rho * (u_t + u * u_r) + p_r - p.alpha * (mu_r * theta + mu * theta_r)
            + (n - 1.0) * mu_r * u_over_r;
        (s_mass, s_mom)
    }

    /// Sources recomputed by nested sixth-order differences of `rho*`,
    /// `u*`; the cross-check for [`Self::source_at`].
    pub fn source_by_stencil(&self, r: f64, t: f64, h: f64) -> (f64, f64) {
        let p = self.params;
        let n1 = (p.dim - 1) as i32;
        let rho = |r: f64| self.density(r, t);
        let u = |r: f64| self.velocity(r, t);
        let rho_t = sixth_order_derivative(&|s| self.density(r, s), t, h);
        let u_t = sixth_order_derivative(&|s| self.velocity(r, s), t, h);
        let flux_r = sixth_order_derivative(&|s| rho(s) * u(s), r, h);
        let u_r = sixth_order_derivative(&u, r, h);
        let p_r = sixth_order_derivative(&|s| p.pressure_coeff * rho(s).powf(p.gamma), r, h);
        let mu = |s: f64| rho(s).powf(p.alpha);
        let mu_r = sixth_order_derivative(&mu, r, h);
        let grouped = |s: f64| {
            let inner = sixth_order_derivative(&|q| q.powi(n1) * u(q), s, h);
            mu(s) * inner / s.powi(n1)
        };
        let grouped_r = sixth_order_derivative(&grouped, r, h);
        let n1 = n1 as f64;
        let s_mass = rho_t + flux_r + n1 * rho(r) * u(r) / r;
        let s_mom = rho(r) * (u_t + u(r) * u_r) + p_r - p.alpha * grouped_r + n1 * mu_r * u(r) / r;
        (s_mass, s_mom)
    }

    pub fn exact_state(&self, grid: &RadialGrid, t: f64) -> Result<FluidState> {
        FluidState::new(
            t,
            grid.centers.iter().map(|&r| self.density(r, t)).collect(),
            grid.centers.iter().map(|&r| self.velocity(r, t)).collect(),
            Boundary::FarField,
        )
    }
}

impl SourceTerms for ManufacturedCase {
    fn fill(&self, grid: &RadialGrid, t: f64, mass: &mut [f64], momentum: &mut [f64]) {
        for (i, &r) in grid.centers.iter().enumerate() {
            let (sm, su) = self.source_at(r, t);
            mass[i] = sm;
            momentum[i] = su;
        }
    }
}

/// `(S_mass, S_mom)` at the cell centres of `grid`.
pub fn mms_sources(case: &ManufacturedCase, grid: &RadialGrid, t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    case.check_time(t)?;
    let mut mass = vec![0.0; grid.n_cells];
    let mut momentum = vec![0.0; grid.n_cells];
    case.fill(grid, t, &mut mass, &mut momentum);
    Ok((mass, momentum))
}

/// Centred sixth-order first derivative.
pub fn sixth_order_derivative(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let d1 = f(x + h) - f(x - h);
    let d2 = f(x + 2.0 * h) - f(x - 2.0 * h);
    let d3 = f(x + 3.0 * h) - f(x - 3.0 * h);
    (45.0 * d1 - 9.0 * d2 + d3) / (60.0 * h)
}

/// Adaptive Simpson quadrature of `f` on `interval` to absolute tolerance
/// `tol`. Fails with the partial estimate once the evaluation budget is
/// spent.
pub fn adaptive_quadrature(f: &dyn Fn(f64) -> f64, interval: (f64, f64), tol: f64) -> Result<f64> {
    adaptive_quadrature_with_budget(f, interval, tol, 20_000_000)
}

/// [`adaptive_quadrature`] with an explicit limit on integrand evaluations.
pub fn adaptive_quadrature_with_budget(
    f: &dyn Fn(f64) -> f64,
    interval: (f64, f64),
    tol: f64,
    max_evals: usize,
) -> Result<f64> {
    const MAX_DEPTH: u32 = 60;
    let (a, b) = interval;
    if !(a.is_finite() && b.is_finite() && b >= a) {
        return Err(Error::usage(format!("bad quadrature interval ({a}, {b})")));
    }
    if !(tol > 0.0) {
        return Err(Error::usage(format!("quadrature tolerance must be positive, got {tol}")));
    }
    if a == b {
        return Ok(0.0);
    }

    struct Panel {
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    }

    let simpson = |a: f64, b: f64, fa: f64, fm: f64, fb: f64| (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let evals = std::cell::Cell::new(0usize);
    let eval = |x: f64| {
        evals.set(evals.get() + 1);
        f(x)
    };

    // start from a few panels so narrow features are not missed entirely
    let pieces = 16;
    let mut stack = Vec::new();
    for k in 0..pieces {
        let lo = a + (b - a) * k as f64 / pieces as f64;
        let hi = if k + 1 == pieces { b } else { a + (b - a) * (k + 1) as f64 / pieces as f64 };
        let (fa, fm, fb) = (eval(lo), eval(0.5 * (lo + hi)), eval(hi));
        stack.push(Panel {
            a: lo,
            b: hi,
            fa,
            fm,
            fb,
            whole: simpson(lo, hi, fa, fm, fb),
            tol: tol / pieces as f64,
            depth: 0,
        });
    }

    let mut total = 0.0;
    let mut exhausted = false;
    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let (flm, frm) = (eval(0.5 * (p.a + m)), eval(0.5 * (m + p.b)));
        let left = simpson(p.a, m, p.fa, flm, p.fm);
        let right = simpson(m, p.b, p.fm, frm, p.fb);
        let delta = left + right - p.whole;
        if !delta.is_finite() {
            return Err(Error::NonFinite(format!("integrand near x = {m}")));
        }
        if delta.abs() <= 15.0 * p.tol || p.depth >= MAX_DEPTH || exhausted {
            if delta.abs() > 15.0 * p.tol {
                exhausted = true;
            }
            total += left + right + delta / 15.0;
            continue;
        }
        if evals.get() > max_evals {
            exhausted = true;
            total += left + right + delta / 15.0;
            continue;
        }
        stack.push(Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left, tol: 0.5 * p.tol, depth: p.depth + 1 });
        stack.push(Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right, tol: 0.5 * p.tol, depth: p.depth + 1 });
    }
    if exhausted {
        return Err(Error::QuadratureBudget { estimate: total });
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderStatus {
    /// Errors at rounding level on every grid.
    Exact,
    Reliable,
    /// Errors did not decrease monotonically.
    Unreliable,
}

impl fmt::Display for OrderStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrderStatus::Exact => "exact",
            OrderStatus::Reliable => "reliable",
            OrderStatus::Unreliable => "unreliable",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n_cells: usize,
    pub dr: f64,
    pub steps: usize,
    pub error_rho: f64,
    pub error_u: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub order_rho: f64,
    pub order_u: f64,
    pub status: OrderStatus,
}

impl ConvergenceReport {
    /// True when the study is exact or both orders lie in `band`.
    pub fn within(&self, band: (f64, f64)) -> bool {
        match self.status {
            OrderStatus::Exact => true,
            OrderStatus::Unreliable => false,
            OrderStatus::Reliable => [self.order_rho, self.order_u]
                .iter()
                .all(|o| *o >= band.0 && *o <= band.1),
        }
    }

    /// CSV with columns `n_cells,dr,steps,error_rho,error_u,order_rho,order_u`;
    /// the order columns hold the pairwise orders against the previous row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n_cells,dr,steps,error_rho,error_u,order_rho,order_u\n");
        for (i, row) in self.rows.iter().enumerate() {
            let (or, ou) = if i == 0 {
                (String::new(), String::new())
            } else {
                let prev = &self.rows[i - 1];
                let h = (prev.dr / row.dr).ln();
                (
                    format!("{:.6}", (prev.error_rho / row.error_rho).ln() / h),
                    format!("{:.6}", (prev.error_u / row.error_u).ln() / h),
                )
            };
            out.push_str(&format!(
                "{},{:.16e},{},{:.16e},{:.16e},{},{}\n",
                row.n_cells, row.dr, row.steps, row.error_rho, row.error_u, or, ou
            ));
        }
        out.push_str(&format!("# order_rho = {:.6}\n# order_u = {:.6}\n# status = {}\n", self.order_rho, self.order_u, self.status));
        out
    }
}

/// Contracted order band for an advection scheme.
pub fn expected_order_band(advection: Advection) -> (f64, f64) {
    match advection {
        Advection::MusclMinmod => (1.8, 2.2),
        Advection::Upwind1 => (0.8, 1.2),
    }
}

/// Least-squares slope of `ln y` against `ln x`.
fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Solve the manufactured problem on one grid and return the `L²` errors
/// at `t_end` with the radial measure.
pub fn manufactured_errors(case: &ManufacturedCase, scheme: &SchemeConfig, n_cells: usize) -> Result<ConvergenceRow> {
    let grid = RadialGrid::new(n_cells, case.r_max, case.params.dim)?;
    let mut stepper = Stepper::new(&grid, case.params, *scheme)?.with_sources(case);
    let mut state = case.exact_state(&grid, 0.0)?;
    let mut steps = 0;
    while state.time < case.t_end {
        let remaining = case.t_end - state.time;
        let (next, report) = stepper.step_capped(&state, remaining)?;
        if !report.step_accepted {
            return Err(Error::degenerate(format!(
                "manufactured run rejected a step at t = {}: {}",
                state.time,
                report.rejection.unwrap_or_default()
            )));
        }
        state = next;
        steps += 1;
        if case.t_end - state.time <= 1e-12 * case.t_end {
            state.time = case.t_end;
        }
    }
    let exact = case.exact_state(&grid, case.t_end)?;
    let l2 = |a: &[f64], b: &[f64]| {
        let sq: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).collect();
        grid.integrate(&sq).sqrt()
    };
    Ok(ConvergenceRow {
        n_cells,
        dr: grid.dr,
        steps,
        error_rho: l2(&state.rho, &exact.rho),
        error_u: l2(&state.u, &exact.u),
    })
}

/// Grid-convergence study over `grid_sizes` (at least three, each doubling
/// the previous). The explicit viscous bound ties `dt` to `dr²`. Grids run
/// concurrently.
pub fn convergence_study(case: &ManufacturedCase, scheme: &SchemeConfig, grid_sizes: &[usize]) -> Result<ConvergenceReport> {
    case.validate()?;
    scheme.validate()?;
    if grid_sizes.len() < 3 {
        return Err(Error::usage("convergence study needs at least three grid sizes"));
    }
    if grid_sizes.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(Error::usage("grid sizes must double successively"));
    }
    let rows: Vec<ConvergenceRow> = std::thread::scope(|scope| {
        let handles: Vec<_> = grid_sizes
            .iter()
            .map(|&n| scope.spawn(move || manufactured_errors(case, scheme, n)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("convergence worker panicked"))
            .collect::<Result<Vec<_>>>()
    })?;

    let floor = 1e-13;
    if rows.iter().all(|r| r.error_rho < floor && r.error_u < floor) {
        return Ok(ConvergenceReport { rows, order_rho: f64::INFINITY, order_u: f64::INFINITY, status: OrderStatus::Exact });
    }
    let dr: Vec<f64> = rows.iter().map(|r| r.dr).collect();
    let er: Vec<f64> = rows.iter().map(|r| r.error_rho).collect();
    let eu: Vec<f64> = rows.iter().map(|r| r.error_u).collect();
    let monotone = |e: &[f64]| e.windows(2).all(|w| w[1] < w[0]) && e.iter().all(|v| *v > 0.0);
    let status = if monotone(&er) && monotone(&eu) { OrderStatus::Reliable } else { OrderStatus::Unreliable };
    Ok(ConvergenceReport {
        order_rho: log_log_slope(&dr, &er),
        order_u: log_log_slope(&dr, &eu),
        rows,
        status,
    })
}
