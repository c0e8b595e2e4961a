//! Uniform cell-centred radial grid on `[0, r_max]`, fluid states and
//! initial-data generators.
//!
//! Cells never touch the origin with a node: centres sit at
//! `r_i = (i + 1/2) dr`. Each cell carries the exact radial measure
//! `(r_{i+1/2}^N - r_{i-1/2}^N) / N`, so summing a constant reproduces
//! `∫ r^{N-1} dr` to rounding.

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::solver::Boundary;

/// Reflection behaviour of a field about `r = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// `f(-r) = f(r)`, e.g. density.
    Even,
    /// `f(-r) = -f(r)`, e.g. radial velocity.
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn times(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Parity of `r^m`.
    pub fn of_power(m: usize) -> Parity {
        if m % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    pub n_cells: usize,
    pub r_max: f64,
    pub dim: usize,
    pub dr: f64,
    /// Cell centres, length `n_cells`.
    pub centers: Vec<f64>,
    /// Cell faces, length `n_cells + 1`, from `0` to `r_max`.
    pub faces: Vec<f64>,
    /// Exact per-cell measure `∫ r^{N-1} dr`.
    pub weights: Vec<f64>,
}

pub fn build_grid(n_cells: usize, r_max: f64, dim: usize) -> Result<RadialGrid> {
    RadialGrid::new(n_cells, r_max, dim)
}

impl RadialGrid {
    pub fn new(n_cells: usize, r_max: f64, dim: usize) -> Result<Self> {
        if n_cells < 8 {
            return Err(Error::usage(format!("need at least 8 cells, got {n_cells}")));
        }
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(Error::usage(format!("r_max must be positive, got {r_max}")));
        }
        if dim != 2 && dim != 3 {
            return Err(Error::usage(format!("dimension must be 2 or 3, got {dim}")));
        }
        let dr = r_max / n_cells as f64;
        let faces: Vec<f64> = (0..=n_cells)
            .map(|i| if i == n_cells { r_max } else { i as f64 * dr })
            .collect();
        let centers = (0..n_cells).map(|i| (i as f64 + 0.5) * dr).collect();
        let n = dim as i32;
        let weights = faces
            .windows(2)
            .map(|f| (f[1].powi(n) - f[0].powi(n)) / dim as f64)
            .collect();
        Ok(RadialGrid {
            n_cells,
            r_max,
            dim,
            dr,
            centers,
            faces,
            weights,
        })
    }

    /// `∫_0^{r_max} r^{N-1} dr`.
    pub fn total_measure(&self) -> f64 {
        self.r_max.powi(self.dim as i32) / self.dim as f64
    }

    /// Midpoint quadrature of `∫ f r^{N-1} dr` with exact cell measures.
    pub fn integrate(&self, field: &[f64]) -> f64 {
        debug_assert_eq!(field.len(), self.n_cells);
        field.iter().zip(&self.weights).map(|(f, w)| f * w).sum()
    }

    /// Second-order derivative of a cell-centred field.
    ///
    /// Central differences in the interior; at the first cell the missing
    /// neighbour is the mirror image across `r = 0` with the given parity; at
    /// the last cell a one-sided second-order stencil.
    pub fn derivative(&self, field: &[f64], parity: Parity) -> Vec<f64> {
        let n = self.n_cells;
        debug_assert_eq!(field.len(), n);
        let inv2 = 0.5 / self.dr;
        let mut out = vec![0.0; n];
        out[0] = (field[1] - parity.sign() * field[0]) * inv2;
        for i in 1..n - 1 {
            out[i] = (field[i + 1] - field[i - 1]) * inv2;
        }
        out[n - 1] = (3.0 * field[n - 1] - 4.0 * field[n - 2] + field[n - 3]) * inv2;
        out
    }

    /// Measure of the overlap of cell `i` with `[a, b]`.
    fn clipped_weight(&self, i: usize, a: f64, b: f64) -> f64 {
        let lo = self.faces[i].max(a);
        let hi = self.faces[i + 1].min(b);
        if hi <= lo {
            return 0.0;
        }
        let n = self.dim as i32;
        (hi.powi(n) - lo.powi(n)) / self.dim as f64
    }

    /// Weighted norm `(∫_a^b |f|^p r^{xi p} r^{N-1} dr)^{1/p}` over
    /// `interval = (a, b)`, or `sup |f| r^xi` over the cells meeting the
    /// interval when `p` is infinite.
    pub fn weighted_lp_norm(&self, field: &[f64], p: f64, xi: f64, interval: (f64, f64)) -> Result<f64> {
        let (a, b) = (interval.0.max(0.0), interval.1.min(self.r_max));
        if !(b > a) {
            return Err(Error::usage(format!(
                "empty interval ({}, {}) for weighted norm",
                interval.0, interval.1
            )));
        }
        if !(p >= 1.0) {
            return Err(Error::usage(format!("norm exponent must be >= 1, got {p}")));
        }
        if p.is_infinite() {
            let sup = (0..self.n_cells)
                .filter(|&i| self.faces[i + 1] > a && self.faces[i] < b)
                .map(|i| field[i].abs() * self.centers[i].powf(xi))
                .fold(0.0, f64::max);
            return Ok(sup);
        }
        let mut acc = 0.0;
        for i in 0..self.n_cells {
            let w = self.clipped_weight(i, a, b);
            if w > 0.0 {
                acc += (field[i].abs() * self.centers[i].powf(xi)).powf(p) * w;
            }
        }
        Ok(acc.powf(1.0 / p))
    }

    /// Lagrangian mass coordinate `y(r) = ∫_0^r rho s^{N-1} ds` at the cell
    /// faces `r_{1/2}, ..., r_{n-1/2}`; the origin value `y(0) = 0` is
    /// implicit.
    pub fn mass_coordinate(&self, rho: &[f64]) -> Result<Vec<f64>> {
        check_positive(rho)?;
        let mut acc = 0.0;
        Ok(rho
            .iter()
            .zip(&self.weights)
            .map(|(r, w)| {
                acc += r * w;
                acc
            })
            .collect())
    }

    /// Geometric volume `∫_0^{y(r)} rho^{-1} dy` recovered from the mass
    /// coordinate at each face; equals `r^N / N`.
    pub fn volume_from_mass_coordinate(&self, rho: &[f64], y: &[f64]) -> Vec<f64> {
        let mut prev = 0.0;
        let mut vol = 0.0;
        y.iter()
            .zip(rho)
            .map(|(&yi, &r)| {
                vol += (yi - prev) / r;
                prev = yi;
                vol
            })
            .collect()
    }
}

pub(crate) fn check_positive(rho: &[f64]) -> Result<()> {
    if let Some((i, r)) = rho.iter().enumerate().find(|(_, r)| !(**r > 0.0)) {
        return Err(Error::degenerate(format!("density {r} at cell {i} is not positive")));
    }
    Ok(())
}

/// Density and radial velocity at one instant, both cell-centred.
#[derive(Debug, Clone, PartialEq)]
pub struct FluidState {
    pub time: f64,
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    pub boundary: Boundary,
}

impl FluidState {
    pub fn new(time: f64, rho: Vec<f64>, u: Vec<f64>, boundary: Boundary) -> Result<Self> {
        if rho.len() != u.len() {
            return Err(Error::usage(format!(
                "density has {} entries but velocity has {}",
                rho.len(),
                u.len()
            )));
        }
        check_positive(&rho)?;
        if let Some(v) = u.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("velocity entry {v}")));
        }
        Ok(FluidState {
            time,
            rho,
            u,
            boundary,
        })
    }

    pub fn constant(grid: &RadialGrid, rho: f64, boundary: Boundary) -> Result<Self> {
        FluidState::new(0.0, vec![rho; grid.n_cells], vec![0.0; grid.n_cells], boundary)
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn density_extrema(&self) -> (f64, f64) {
        self.rho
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| (lo.min(r), hi.max(r)))
    }

    pub fn total_mass(&self, grid: &RadialGrid) -> f64 {
        grid.integrate(&self.rho)
    }
}

/// Shape of the initial density perturbation.
#[derive(Debug, Clone, PartialEq)]
pub enum DensityProfile {
    Constant,
    /// Gaussian of the given width centred at `center`, reflected evenly
    /// about the origin so the profile is smooth there.
    GaussianBump { amplitude: f64, center: f64, width: f64 },
    /// Compactly supported `C^∞` bump `exp(1 - 1/(1 - s^2))`, `s = |r - c| / width`,
    /// reflected like the Gaussian.
    CompactBump { amplitude: f64, center: f64, width: f64 },
    /// Tabulated `(r, rho, u)` rows, linearly interpolated; held constant
    /// beyond the last row.
    Table(Vec<[f64; 3]>),
}

/// Initial radial velocity `u0 = B r exp(-(r/l)^2)`; odd about the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityProfile {
    pub amplitude: f64,
    pub width: f64,
}

impl Default for VelocityProfile {
    fn default() -> Self {
        VelocityProfile {
            amplitude: 0.0,
            width: 1.0,
        }
    }
}

impl VelocityProfile {
    pub fn eval(&self, r: f64) -> f64 {
        let s = r / self.width;
        self.amplitude * r * (-s * s).exp()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialDataSpec {
    pub density: DensityProfile,
    pub velocity: VelocityProfile,
}

impl InitialDataSpec {
    pub fn constant() -> Self {
        InitialDataSpec {
            density: DensityProfile::Constant,
            velocity: VelocityProfile::default(),
        }
    }

    pub fn gaussian(amplitude: f64, center: f64, width: f64) -> Self {
        InitialDataSpec {
            density: DensityProfile::GaussianBump {
                amplitude,
                center,
                width,
            },
            velocity: VelocityProfile::default(),
        }
    }

    pub fn with_velocity(mut self, amplitude: f64, width: f64) -> Self {
        self.velocity = VelocityProfile { amplitude, width };
        self
    }
}

fn gaussian_shape(s: f64) -> f64 {
    (-s * s).exp()
}

fn compact_shape(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

/// Even reflection `(b(r - c) + b(r + c)) / (1 + b(2c))`, equal to 1 at
/// `r = c` and smooth across the origin.
fn reflected(shape: fn(f64) -> f64, r: f64, center: f64, width: f64) -> f64 {
    let norm = 1.0 + shape(2.0 * center / width);
    (shape((r - center) / width) + shape((r + center) / width)) / norm
}

fn interpolate_table(rows: &[[f64; 3]], r: f64) -> (f64, f64) {
    let first = rows[0];
    let last = rows[rows.len() - 1];
    if r <= first[0] {
        return (first[1], first[2]);
    }
    if r >= last[0] {
        return (last[1], last[2]);
    }
    let j = rows.partition_point(|row| row[0] <= r);
    let (a, b) = (rows[j - 1], rows[j]);
    let t = (r - a[0]) / (b[0] - a[0]);
    (a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2]))
}

/// Sample an initial state on `grid`. Returns the state together with
/// warnings (e.g. a perturbation that has not decayed by `r_max`).
pub fn make_initial_data(
    spec: &InitialDataSpec,
    grid: &RadialGrid,
    params: &ModelParams,
    boundary: Boundary,
) -> Result<(FluidState, Vec<String>)> {
    let base = params.require_far_density()?;
    let mut warnings = Vec::new();
    let decay_tol = 1e-12;

    let (rho, mut u): (Vec<f64>, Vec<f64>) = match &spec.density {
        DensityProfile::Constant => (vec![base; grid.n_cells], vec![0.0; grid.n_cells]),
        DensityProfile::GaussianBump {
            amplitude,
            center,
            width,
        }
        | DensityProfile::CompactBump {
            amplitude,
            center,
            width,
        } => {
            if !(*width > 0.0) {
                return Err(Error::usage(format!("bump width must be positive, got {width}")));
            }
            if *center < 0.0 {
                return Err(Error::usage(format!("bump center must be >= 0, got {center}")));
            }
            if *amplitude <= -base {
                return Err(Error::usage(format!(
                    "bump amplitude {amplitude} would make the density nonpositive (far density {base})"
                )));
            }
            let shape: fn(f64) -> f64 = match spec.density {
                DensityProfile::GaussianBump { .. } => gaussian_shape,
                _ => compact_shape,
            };
            let tail = reflected(shape, grid.r_max, *center, *width);
            if tail > decay_tol {
                warnings.push(format!(
                    "density bump is {tail:.3e} of its amplitude at r_max; consider a larger domain"
                ));
            }
            let rho = grid
                .centers
                .iter()
                .map(|&r| base + amplitude * reflected(shape, r, *center, *width))
                .collect();
            (rho, vec![0.0; grid.n_cells])
        }
        DensityProfile::Table(rows) => {
            if rows.len() < 2 {
                return Err(Error::usage("custom table needs at least two rows"));
            }
            if rows.windows(2).any(|w| !(w[1][0] > w[0][0])) {
                return Err(Error::usage("custom table radii must be strictly increasing"));
            }
            grid.centers.iter().map(|&r| interpolate_table(rows, r)).unzip()
        }
    };

    if spec.velocity.amplitude != 0.0 {
        if !(spec.velocity.width > 0.0) {
            return Err(Error::usage("velocity width must be positive"));
        }
        let tail = (spec.velocity.eval(grid.r_max) / spec.velocity.amplitude).abs();
        if tail > decay_tol {
            warnings.push(format!(
                "velocity profile is {tail:.3e} of its amplitude at r_max; consider a larger domain"
            ));
        }
        for (v, &r) in u.iter_mut().zip(&grid.centers) {
            *v += spec.velocity.eval(r);
        }
    }

    if let Err(e) = check_positive(&rho) {
        return Err(Error::usage(format!("initial density: {e}")));
    }
    let state = FluidState::new(0.0, rho, u, boundary)?;
    Ok((state, warnings))
}
