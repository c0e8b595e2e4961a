//! Model constants and the admissibility windows in `(alpha, gamma)`.
//!
//! The lower bounds on `alpha` are characterised by two cubics:
//!
//! * `k1`, the root in `(2, inf)` of `k^3 - 6k^2 + 8k - 4`, gives the planar
//!   threshold `1 - 2/k1`;
//! * `k2`, the root in `(2, inf)` of `2k^3 - 9k^2 + 10k - 4`, gives the
//!   spatial threshold `1 - 1/k2`.
//!
//! With weighted data in the plane the bound relaxes to `9 - 6 sqrt(2)`.
//! All windows are open intervals; a parameter on a boundary is reported as
//! not admissible.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Relative gap below which two numbers are treated as equal when testing a
/// strict inequality. Keeps boundary cases such as `gamma = 6 alpha - 3`
/// from being admitted by a rounding error in the last bit.
const STRICT_GAP: f64 = 1e-12;

/// `a < b` with a rounding guard: equal-up-to-rounding counts as not less.
pub fn strictly_less(a: f64, b: f64) -> bool {
    if b == f64::INFINITY {
        return a.is_finite();
    }
    let scale = a.abs().max(b.abs()).max(1.0);
    b - a > STRICT_GAP * scale
}

/// Physical and constitutive constants of the barotropic model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Spatial dimension `N`, either 2 or 3.
    pub dim: usize,
    /// Viscosity exponent: `mu = rho^alpha`.
    pub alpha: f64,
    /// Adiabatic exponent: `P = a rho^gamma`.
    pub gamma: f64,
    /// Pressure coefficient `a`.
    pub pressure_coeff: f64,
    /// Far-field density for the Cauchy problem, or the reference density of
    /// the potential energy for the ball problem.
    pub far_density: Option<f64>,
}

impl ModelParams {
    pub fn new(dim: usize, alpha: f64, gamma: f64, far_density: Option<f64>) -> Result<Self> {
        let params = ModelParams {
            dim,
            alpha,
            gamma,
            pressure_coeff: 1.0,
            far_density,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_pressure_coeff(mut self, a: f64) -> Result<Self> {
        self.pressure_coeff = a;
        self.validate()?;
        Ok(self)
    }

    /// Debug variant with the pressure switched off (`a = 0`). Used to isolate
    /// the transport part of the effective-velocity balance.
    pub fn pressure_free(mut self) -> Self {
        self.pressure_coeff = 0.0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim != 2 && self.dim != 3 {
            return Err(Error::usage(format!("dimension must be 2 or 3, got {}", self.dim)));
        }
        if !self.alpha.is_finite() || self.alpha <= 0.0 || self.alpha > 1.0 {
            return Err(Error::usage(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        // mu + N lambda = (1 + N(alpha - 1)) rho^alpha >= 0
        let n = self.dim as f64;
        if 1.0 + n * (self.alpha - 1.0) < 0.0 {
            return Err(Error::usage(format!(
                "alpha = {} violates mu + N lambda >= 0, need alpha >= {}",
                self.alpha,
                (n - 1.0) / n
            )));
        }
        if !self.gamma.is_finite() || self.gamma <= 1.0 {
            return Err(Error::usage(format!("gamma must exceed 1, got {}", self.gamma)));
        }
        if !self.pressure_coeff.is_finite() || self.pressure_coeff <= 0.0 {
            return Err(Error::usage(format!(
                "pressure coefficient must be positive, got {}",
                self.pressure_coeff
            )));
        }
        if let Some(rho) = self.far_density {
            if !rho.is_finite() || rho <= 0.0 {
                return Err(Error::usage(format!("far-field density must be positive, got {rho}")));
            }
        }
        Ok(())
    }

    pub fn require_far_density(&self) -> Result<f64> {
        self.far_density.ok_or_else(|| {
            Error::usage("a far-field (reference) density is required for this operation")
        })
    }
}

/// Problem classes for which a global-existence window is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Cauchy2d,
    Cauchy2dWeighted,
    Cauchy3d,
    Ball3d,
}

impl Regime {
    pub const ALL: [Regime; 4] = [
        Regime::Cauchy2d,
        Regime::Cauchy2dWeighted,
        Regime::Cauchy3d,
        Regime::Ball3d,
    ];

    pub fn dim(self) -> usize {
        match self {
            Regime::Cauchy2d | Regime::Cauchy2dWeighted => 2,
            Regime::Cauchy3d | Regime::Ball3d => 3,
        }
    }

    pub fn is_ball(self) -> bool {
        matches!(self, Regime::Ball3d)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Cauchy2d => "cauchy-2d",
            Regime::Cauchy2dWeighted => "cauchy-2d-weighted",
            Regime::Cauchy3d => "cauchy-3d",
            Regime::Ball3d => "ball-3d",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Regime::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| {
                Error::usage(format!(
                    "unknown regime '{s}', expected one of cauchy-2d, cauchy-2d-weighted, cauchy-3d, ball-3d"
                ))
            })
    }
}

impl Serialize for Regime {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

fn serialize_bound<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str(if *v > 0.0 { "+inf" } else { "-inf" })
    }
}

/// Verdict of [`check_admissibility`] together with the thresholds used.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    pub regime: Regime,
    pub alpha_lower: f64,
    pub alpha_upper: f64,
    pub gamma_lower: f64,
    #[serde(serialize_with = "serialize_bound")]
    pub gamma_upper: f64,
    pub violated_conditions: Vec<String>,
    pub notes: Vec<String>,
}

impl fmt::Display for AdmissibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "regime: {}", self.regime)?;
        writeln!(f, "admissible: {}", self.admissible)?;
        writeln!(f, "alpha window: ({:.10}, {})", self.alpha_lower, self.alpha_upper)?;
        if self.gamma_upper.is_finite() {
            writeln!(f, "gamma window: ({}, {:.10})", self.gamma_lower, self.gamma_upper)?;
        } else {
            writeln!(f, "gamma window: ({}, +inf)", self.gamma_lower)?;
        }
        if !self.violated_conditions.is_empty() {
            writeln!(f, "violated: {}", self.violated_conditions.join(", "))?;
        }
        for note in &self.notes {
            writeln!(f, "note: {note}")?;
        }
        Ok(())
    }
}

fn k1_cubic(k: f64) -> (f64, f64) {
    (((k - 6.0) * k + 8.0) * k - 4.0, (3.0 * k - 12.0) * k + 8.0)
}

fn k2_cubic(k: f64) -> (f64, f64) {
    (((2.0 * k - 9.0) * k + 10.0) * k - 4.0, (6.0 * k - 18.0) * k + 10.0)
}

/// Residual of the cubic defining `k1`.
pub fn k1_residual(k: f64) -> f64 {
    k1_cubic(k).0
}

/// Residual of the cubic defining `k2`.
pub fn k2_residual(k: f64) -> f64 {
    k2_cubic(k).0
}

/// Bisection on a sign-changing bracket down to `1e-13`, followed by two
/// Newton steps.
fn bracketed_root(f: impl Fn(f64) -> (f64, f64), mut lo: f64, mut hi: f64) -> f64 {
    let f_lo = f(lo).0;
    debug_assert!(f_lo * f(hi).0 < 0.0, "bracket does not change sign");
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid).0;
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut k = 0.5 * (lo + hi);
    for _ in 0..2 {
        let (value, slope) = f(k);
        if slope != 0.0 {
            k -= value / slope;
        }
    }
    k
}

/// The planar threshold root `k1 ~ 4.38298`.
pub fn root_k1() -> f64 {
    bracketed_root(k1_cubic, 4.0, 5.0)
}

/// The spatial threshold root `k2 ~ 3.0922`.
pub fn root_k2() -> f64 {
    bracketed_root(k2_cubic, 3.0, 4.0)
}

/// Planar momentum-integrability threshold
/// `f(k) = 1 - (2k sqrt(k-1) - 4k + 4) / (k-2)^2`, strictly increasing on `(2, inf)`.
pub fn f2(k: f64) -> Result<f64> {
    if !(k > 2.0) {
        return Err(Error::domain(format!("f2 requires k > 2, got {k}")));
    }
    // the numerator is 2 s (s - 1)^2 with s = sqrt(k - 1), and
    // (s - 1)^2 = (k - 2)^2 / (s + 1)^2 removes the cancellation near k = 2
    let s = (k - 1.0).sqrt();
    Ok(1.0 - 2.0 * s / ((s + 1.0) * (s + 1.0)))
}

/// Spatial momentum-integrability threshold
/// `g(k) = 1 - (sqrt(2k^3 - k^2 - 2k + 1) - 3k + 3) / (k-2)^2`.
pub fn g3(k: f64) -> Result<f64> {
    if !(k > 2.0) {
        return Err(Error::domain(format!("g3 requires k > 2, got {k}")));
    }
    // radicand - (3k - 3)^2 = 2 (k - 1)(k - 2)^2, so the numerator is that
    // over sqrt(radicand) + 3k - 3
    let radicand = ((2.0 * k - 1.0) * k - 2.0) * k + 1.0;
    Ok(1.0 - 2.0 * (k - 1.0) / (radicand.sqrt() + 3.0 * (k - 1.0)))
}

/// Whether the `k`-th momentum moment can be controlled for these parameters:
/// `k^2 (1-alpha)^2 < 4 (k-1) alpha^2` in the plane and
/// `k^2 (1-alpha)^2 < (4 alpha - 2)(k-1) alpha` in space.
pub fn momentum_exponent_ok(params: &ModelParams, k: f64) -> bool {
    let a = params.alpha;
    let lhs = k * k * (1.0 - a) * (1.0 - a);
    let rhs = match params.dim {
        2 => 4.0 * (k - 1.0) * a * a,
        _ => (4.0 * a - 2.0) * (k - 1.0) * a,
    };
    strictly_less(lhs, rhs)
}

/// Lower bound on `alpha` for a regime.
pub fn alpha_lower_bound(regime: Regime) -> f64 {
    match regime {
        Regime::Cauchy2d => 1.0 - 2.0 / root_k1(),
        Regime::Cauchy2dWeighted => 9.0 - 6.0 * std::f64::consts::SQRT_2,
        Regime::Cauchy3d | Regime::Ball3d => 1.0 - 1.0 / root_k2(),
    }
}

/// Evaluate the global-existence window for `params` in `regime`.
///
/// `eta` is the weight exponent of the weighted planar data class and must be
/// given exactly when `regime` is [`Regime::Cauchy2dWeighted`]. An `eta`
/// outside `[1/3, 1]` is reported as a violated condition.
pub fn check_admissibility(
    params: &ModelParams,
    regime: Regime,
    eta: Option<f64>,
) -> Result<AdmissibilityReport> {
    if regime.dim() != params.dim {
        return Err(Error::usage(format!(
            "regime {regime} requires N = {}, but params have N = {}",
            regime.dim(),
            params.dim
        )));
    }
    match (regime, eta) {
        (Regime::Cauchy2dWeighted, None) => {
            return Err(Error::usage("regime cauchy-2d-weighted requires eta"));
        }
        (r, Some(_)) if r != Regime::Cauchy2dWeighted => {
            return Err(Error::usage(format!("eta is only meaningful for cauchy-2d-weighted, not {r}")));
        }
        _ => {}
    }

    let alpha_lower = alpha_lower_bound(regime);
    let gamma_upper = if regime.dim() == 3 {
        6.0 * params.alpha - 3.0
    } else {
        f64::INFINITY
    };

    let mut violated = Vec::new();
    if !strictly_less(alpha_lower, params.alpha) {
        violated.push(format!("alpha_lower: alpha = {} <= {:.10}", params.alpha, alpha_lower));
    }
    if !strictly_less(params.alpha, 1.0) {
        violated.push(format!("alpha_upper: alpha = {} >= 1", params.alpha));
    }
    if !strictly_less(1.0, params.gamma) {
        violated.push(format!("gamma_lower: gamma = {} <= 1", params.gamma));
    }
    if !strictly_less(params.gamma, gamma_upper) {
        violated.push(format!(
            "gamma_upper: gamma = {} >= 6 alpha - 3 = {:.10}",
            params.gamma, gamma_upper
        ));
    }
    if let Some(eta) = eta {
        if !(1.0 / 3.0..=1.0).contains(&eta) {
            violated.push(format!("eta_range: eta = {eta} outside [1/3, 1]"));
        }
    }

    let mut notes = Vec::new();
    if params.pressure_coeff != 1.0 {
        notes.push("thresholds stated for a=1".to_string());
    }

    Ok(AdmissibilityReport {
        admissible: violated.is_empty(),
        regime,
        alpha_lower,
        alpha_upper: 1.0,
        gamma_lower: 1.0,
        gamma_upper,
        violated_conditions: violated,
        notes,
    })
}
