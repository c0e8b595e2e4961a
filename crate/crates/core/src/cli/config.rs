//! Run configuration files.
//!
//! The format is sectioned `key = value` text:
//!
//! ```text
//! # comment
//! [model]
//! dim = 3
//! alpha = 0.7
//! gamma = 1.1
//!
//! [problem]
//! regime = cauchy-3d
//! ```
//!
//! Unknown sections or keys and duplicate keys are parse errors. Serialising
//! writes every key, so `parse -> serialize -> parse` is the identity.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::diagnostics::{DiagnosticsConfig, WeightedNormSpec};
use crate::error::{Error, Result};
use crate::grid::{DensityProfile, InitialDataSpec, VelocityProfile};
use crate::params::{check_admissibility, AdmissibilityReport, ModelParams, Regime};
use crate::solver::{Advection, Boundary, SchemeConfig, TimeIntegrator, ViscousTreatment};

/// Environment variable that replaces `[output] dir`.
pub const OUTPUT_DIR_ENV: &str = "RADIAL_NS_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AdmissibilityPolicy {
    Enforce,
    #[default]
    Warn,
}

impl fmt::Display for AdmissibilityPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AdmissibilityPolicy::Enforce => "enforce",
            AdmissibilityPolicy::Warn => "warn",
        })
    }
}

impl FromStr for AdmissibilityPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "enforce" => Ok(AdmissibilityPolicy::Enforce),
            "warn" => Ok(AdmissibilityPolicy::Warn),
            other => Err(Error::usage(format!("unknown policy '{other}', expected enforce or warn"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    Constant,
    Gaussian,
    Compact,
    Table,
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProfileKind::Constant => "constant",
            ProfileKind::Gaussian => "gaussian",
            ProfileKind::Compact => "compact",
            ProfileKind::Table => "table",
        })
    }
}

impl FromStr for ProfileKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(ProfileKind::Constant),
            "gaussian" => Ok(ProfileKind::Gaussian),
            "compact" => Ok(ProfileKind::Compact),
            "table" => Ok(ProfileKind::Table),
            other => Err(Error::usage(format!(
                "unknown profile '{other}', expected constant, gaussian, compact or table"
            ))),
        }
    }
}

/// Initial data as written in the file. A table profile reads rows
/// `r rho u` from `table`, resolved against the config file's directory.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialConfig {
    pub profile: ProfileKind,
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
    pub velocity_amplitude: f64,
    pub velocity_width: f64,
    pub table: Option<String>,
}

impl Default for InitialConfig {
    fn default() -> Self {
        InitialConfig {
            profile: ProfileKind::Constant,
            amplitude: 0.0,
            center: 0.0,
            width: 1.0,
            velocity_amplitude: 0.0,
            velocity_width: 1.0,
            table: None,
        }
    }
}

impl InitialConfig {
    pub fn to_spec(&self, base_dir: Option<&Path>) -> Result<InitialDataSpec> {
        let (amplitude, center, width) = (self.amplitude, self.center, self.width);
        let density = match self.profile {
            ProfileKind::Constant => DensityProfile::Constant,
            ProfileKind::Gaussian => DensityProfile::GaussianBump { amplitude, center, width },
            ProfileKind::Compact => DensityProfile::CompactBump { amplitude, center, width },
            ProfileKind::Table => {
                let name = self
                    .table
                    .as_deref()
                    .ok_or_else(|| Error::usage("profile = table needs a 'table' path"))?;
                let path = match base_dir {
                    Some(dir) if Path::new(name).is_relative() => dir.join(name),
                    _ => PathBuf::from(name),
                };
                DensityProfile::Table(read_table(&path)?)
            }
        };
        Ok(InitialDataSpec {
            density,
            velocity: VelocityProfile {
                amplitude: self.velocity_amplitude,
                width: self.velocity_width,
            },
        })
    }
}

fn read_table(path: &Path) -> Result<Vec<[f64; 3]>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::usage(format!("cannot read table {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_error(k + 1, &format!("bad number in table: {e}"), line))?;
        if vals.len() != 3 {
            return Err(parse_error(k + 1, "table rows need three columns r rho u", line));
        }
        rows.push([vals[0], vals[1], vals[2]]);
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    pub regime: Regime,
    /// Weight exponent of the weighted planar window.
    pub eta: Option<f64>,
    pub policy: AdmissibilityPolicy,
    pub n_cells: usize,
    pub r_max: f64,
    pub scheme: SchemeConfig,
    pub initial: InitialConfig,
    pub t_end: f64,
    pub sample_every: f64,
    pub snapshot_every: f64,
    pub k_moments: Vec<f64>,
    /// Emit the `|x|^{eta/2}`-weighted norms.
    pub weighted: bool,
    pub norms: Vec<WeightedNormSpec>,
    pub output_dir: String,
}

impl RunConfig {
    /// A small constant-state configuration, useful as a starting point.
    pub fn example() -> Self {
        RunConfig {
            params: ModelParams::new(3, 0.7, 1.1, Some(1.0)).expect("valid example"),
            regime: Regime::Cauchy3d,
            eta: None,
            policy: AdmissibilityPolicy::Warn,
            n_cells: 128,
            r_max: 8.0,
            scheme: SchemeConfig::default(),
            initial: InitialConfig::default(),
            t_end: 0.1,
            sample_every: 0.05,
            snapshot_every: 0.1,
            k_moments: vec![2.0],
            weighted: false,
            norms: Vec::new(),
            output_dir: "out".to_string(),
        }
    }

    pub fn boundary(&self) -> Boundary {
        if self.regime.is_ball() {
            Boundary::Wall
        } else {
            Boundary::FarField
        }
    }

    pub fn diagnostics(&self) -> DiagnosticsConfig {
        let mut weighted_norms = Vec::new();
        if self.weighted {
            if let Some(eta) = self.eta {
                weighted_norms.extend(DiagnosticsConfig::eta_weighted_norms(eta));
            }
        }
        weighted_norms.extend(self.norms.iter().copied());
        DiagnosticsConfig {
            k_moments: self.k_moments.clone(),
            weighted_norms,
        }
    }

    /// Admissibility of the configured parameters; `eta` is passed only for
    /// the weighted regime.
    pub fn admissibility(&self) -> Result<AdmissibilityReport> {
        let eta = if self.regime == Regime::Cauchy2dWeighted { self.eta } else { None };
        check_admissibility(&self.params, self.regime, eta)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.params.require_far_density()?;
        if self.params.dim != self.regime.dim() {
            return Err(Error::usage(format!(
                "regime {} needs dim = {}, config has dim = {}",
                self.regime,
                self.regime.dim(),
                self.params.dim
            )));
        }
        if self.n_cells < 8 {
            return Err(Error::usage(format!("n_cells must be >= 8, got {}", self.n_cells)));
        }
        if !(self.r_max > 0.0 && self.r_max.is_finite()) {
            return Err(Error::usage(format!("r_max must be positive, got {}", self.r_max)));
        }
        self.scheme.validate()?;
        for (name, v) in [
            ("t_end", self.t_end),
            ("sample_every", self.sample_every),
            ("snapshot_every", self.snapshot_every),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::usage(format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(k) = self.k_moments.iter().find(|k| !(**k >= 2.0 && k.is_finite())) {
            return Err(Error::usage(format!("k-moment exponents must be >= 2, got {k}")));
        }
        let needs_eta = self.weighted || self.regime == Regime::Cauchy2dWeighted;
        if needs_eta {
            let eta = self
                .eta
                .ok_or_else(|| Error::usage("weighted diagnostics need eta in [1/3, 1]"))?;
            if self.weighted && !(1.0 / 3.0..=1.0).contains(&eta) {
                return Err(Error::usage(format!("eta must lie in [1/3, 1], got {eta}")));
            }
        }
        if self.initial.profile == ProfileKind::Table && self.initial.table.is_none() {
            return Err(Error::usage("profile = table needs a 'table' path"));
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::usage(format!("cannot read {}: {e}", path.display())))?;
        text.parse()
    }

    /// Output directory after the environment override.
    pub fn resolved_output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => PathBuf::from(&self.output_dir),
        }
    }

    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        let mut section = |name: &str, entries: Vec<(&str, String)>| {
            out.push_str(&format!("[{name}]\n"));
            for (k, v) in entries {
                out.push_str(&format!("{k} = {v}\n"));
            }
            out.push('\n');
        };
        let p = &self.params;
        let mut model = vec![
            ("dim", p.dim.to_string()),
            ("alpha", fmt_f64(p.alpha)),
            ("gamma", fmt_f64(p.gamma)),
            ("pressure_coeff", fmt_f64(p.pressure_coeff)),
        ];
        if let Some(far) = p.far_density {
            model.push(("far_density", fmt_f64(far)));
        }
        section("model", model);
        let mut problem = vec![("regime", self.regime.to_string()), ("policy", self.policy.to_string())];
        if let Some(eta) = self.eta {
            problem.push(("eta", fmt_f64(eta)));
        }
        section("problem", problem);
        section("grid", vec![("n_cells", self.n_cells.to_string()), ("r_max", fmt_f64(self.r_max))]);
        let s = &self.scheme;
        section(
            "scheme",
            vec![
                ("advection", s.advection.to_string()),
                ("viscous", s.viscous.to_string()),
                ("integrator", s.integrator.to_string()),
                ("cfl", fmt_f64(s.cfl_number)),
                ("viscous_safety", fmt_f64(s.viscous_safety)),
            ],
        );
        let i = &self.initial;
        let mut initial = vec![
            ("profile", i.profile.to_string()),
            ("amplitude", fmt_f64(i.amplitude)),
            ("center", fmt_f64(i.center)),
            ("width", fmt_f64(i.width)),
            ("velocity_amplitude", fmt_f64(i.velocity_amplitude)),
            ("velocity_width", fmt_f64(i.velocity_width)),
        ];
        if let Some(t) = &i.table {
            initial.push(("table", t.clone()));
        }
        section("initial", initial);
        section(
            "run",
            vec![
                ("t_end", fmt_f64(self.t_end)),
                ("sample_every", fmt_f64(self.sample_every)),
                ("snapshot_every", fmt_f64(self.snapshot_every)),
            ],
        );
        section(
            "diagnostics",
            vec![
                ("k_moments", self.k_moments.iter().map(|k| fmt_f64(*k)).collect::<Vec<_>>().join(", ")),
                ("weighted", self.weighted.to_string()),
                ("norms", self.norms.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", ")),
            ],
        );
        section("output", vec![("dir", self.output_dir.clone())]);
        out.pop();
        out
    }
}

/// Shortest text that reads back to the same `f64`.
fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn parse_error(line: usize, msg: &str, context: &str) -> Error {
    Error::Parse {
        line,
        msg: msg.to_string(),
        context: context.to_string(),
    }
}

const SCHEMA: &[(&str, &[&str])] = &[
    ("model", &["dim", "alpha", "gamma", "pressure_coeff", "far_density"]),
    ("problem", &["regime", "policy", "eta"]),
    ("grid", &["n_cells", "r_max"]),
    ("scheme", &["advection", "viscous", "integrator", "cfl", "viscous_safety"]),
    ("initial", &["profile", "amplitude", "center", "width", "velocity_amplitude", "velocity_width", "table"]),
    ("run", &["t_end", "sample_every", "snapshot_every"]),
    ("diagnostics", &["k_moments", "weighted", "norms"]),
    ("output", &["dir"]),
];

struct Entry {
    value: String,
    line: usize,
    raw: String,
}

struct Document {
    entries: BTreeMap<(String, String), Entry>,
}

impl Document {
    fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut section: Option<String> = None;
        for (k, raw) in text.lines().enumerate() {
            let line_no = k + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| parse_error(line_no, "unterminated section header", raw))?
                    .trim();
                if !SCHEMA.iter().any(|(s, _)| *s == name) {
                    return Err(parse_error(line_no, &format!("unknown section [{name}]"), raw));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_error(line_no, "expected 'key = value'", raw))?;
            let (key, value) = (key.trim(), value.trim());
            let sec = section
                .clone()
                .ok_or_else(|| parse_error(line_no, "key outside of any section", raw))?;
            let known = SCHEMA.iter().find(|(s, _)| *s == sec).map(|(_, keys)| *keys).unwrap_or(&[]);
            if !known.contains(&key) {
                return Err(parse_error(line_no, &format!("unknown key '{key}' in [{sec}]"), raw));
            }
            let entry = Entry {
                value: value.to_string(),
                line: line_no,
                raw: raw.to_string(),
            };
            if entries.insert((sec.clone(), key.to_string()), entry).is_some() {
                return Err(parse_error(line_no, &format!("duplicate key '{key}' in [{sec}]"), raw));
            }
        }
        Ok(Document { entries })
    }

    fn get(&self, section: &str, key: &str) -> Option<&Entry> {
        self.entries.get(&(section.to_string(), key.to_string()))
    }

    fn typed<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        match self.get(section, key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse::<T>()
                .map(Some)
                .map_err(|err| parse_error(e.line, &format!("[{section}] {key}: {err}"), &e.raw)),
        }
    }

    fn required<T: FromStr>(&self, section: &str, key: &str) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        self.typed(section, key)?
            .ok_or_else(|| Error::usage(format!("missing required key '{key}' in [{section}]")))
    }

    fn list<T: FromStr>(&self, section: &str, key: &str) -> Result<Vec<T>>
    where
        T::Err: fmt::Display,
    {
        let Some(e) = self.get(section, key) else {
            return Ok(Vec::new());
        };
        e.value
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<T>()
                    .map_err(|err| parse_error(e.line, &format!("[{section}] {key}: {err}"), &e.raw))
            })
            .collect()
    }
}

impl FromStr for RunConfig {
    type Err = Error;

    /// Parse and fully validate.
    fn from_str(text: &str) -> Result<Self> {
        let doc = Document::parse(text)?;
        let dim: usize = doc.required("model", "dim")?;
        let alpha: f64 = doc.required("model", "alpha")?;
        let gamma: f64 = doc.required("model", "gamma")?;
        let regime: Regime = doc.required("problem", "regime")?;
        let far: Option<f64> = doc.typed("model", "far_density")?;
        if regime.is_ball() && far.is_none() {
            return Err(Error::usage("regime ball-3d needs an explicit far_density as the reference density of K"));
        }
        let far = far.unwrap_or(1.0);
        let a: f64 = doc.typed("model", "pressure_coeff")?.unwrap_or(1.0);
        let params = ModelParams::new(dim, alpha, gamma, Some(far))?.with_pressure_coeff(a)?;

        let defaults = SchemeConfig::default();
        let scheme = SchemeConfig {
            advection: doc.typed::<Advection>("scheme", "advection")?.unwrap_or(defaults.advection),
            viscous: doc.typed::<ViscousTreatment>("scheme", "viscous")?.unwrap_or(defaults.viscous),
            integrator: doc.typed::<TimeIntegrator>("scheme", "integrator")?.unwrap_or(defaults.integrator),
            cfl_number: doc.typed("scheme", "cfl")?.unwrap_or(defaults.cfl_number),
            viscous_safety: doc.typed("scheme", "viscous_safety")?.unwrap_or(defaults.viscous_safety),
        };

        let d = InitialConfig::default();
        let initial = InitialConfig {
            profile: doc.typed("initial", "profile")?.unwrap_or(d.profile),
            amplitude: doc.typed("initial", "amplitude")?.unwrap_or(d.amplitude),
            center: doc.typed("initial", "center")?.unwrap_or(d.center),
            width: doc.typed("initial", "width")?.unwrap_or(d.width),
            velocity_amplitude: doc.typed("initial", "velocity_amplitude")?.unwrap_or(d.velocity_amplitude),
            velocity_width: doc.typed("initial", "velocity_width")?.unwrap_or(d.velocity_width),
            table: doc.get("initial", "table").map(|e| e.value.clone()),
        };

        let t_end: f64 = doc.required("run", "t_end")?;
        let config = RunConfig {
            params,
            regime,
            eta: doc.typed("problem", "eta")?,
            policy: doc.typed("problem", "policy")?.unwrap_or_default(),
            n_cells: doc.required("grid", "n_cells")?,
            r_max: doc.required("grid", "r_max")?,
            scheme,
            initial,
            t_end,
            sample_every: doc.typed("run", "sample_every")?.unwrap_or(t_end),
            snapshot_every: doc.typed("run", "snapshot_every")?.unwrap_or(t_end),
            k_moments: doc.list("diagnostics", "k_moments")?,
            weighted: doc.typed("diagnostics", "weighted")?.unwrap_or(false),
            norms: doc.list("diagnostics", "norms")?,
            output_dir: doc.get("output", "dir").map(|e| e.value.clone()).unwrap_or_else(|| "out".to_string()),
        };
        config.validate()?;
        Ok(config)
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_config_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = "\
# desk-scale bump
[model]
dim = 2
alpha = 0.6
gamma = 1.4
far_density = 1.5

[problem]
regime = cauchy-2d-weighted
eta = 0.5
policy = enforce

[grid]
n_cells = 256
r_max = 12

[scheme]
advection = upwind1
viscous = semi-implicit
cfl = 0.3

[initial]
profile = gaussian
amplitude = 0.2
width = 0.75
velocity_amplitude = 0.1

[run]
t_end = 0.25
sample_every = 0.05

[diagnostics]
k_moments = 2, 3.5
weighted = true
norms = u:inf:0, rho:2:0.1
";

    #[test]
    fn parses_full_file() {
        let c: RunConfig = FULL.parse().unwrap();
        assert_eq!(c.params.dim, 2);
        assert_eq!(c.params.far_density, Some(1.5));
        assert_eq!(c.regime, Regime::Cauchy2dWeighted);
        assert_eq!(c.eta, Some(0.5));
        assert_eq!(c.policy, AdmissibilityPolicy::Enforce);
        assert_eq!(c.scheme.advection, Advection::Upwind1);
        assert_eq!(c.scheme.viscous, ViscousTreatment::SemiImplicit);
        assert_eq!(c.scheme.viscous_safety, 0.4);
        assert_eq!(c.initial.profile, ProfileKind::Gaussian);
        assert_eq!(c.snapshot_every, 0.25);
        assert_eq!(c.k_moments, vec![2.0, 3.5]);
        assert_eq!(c.norms.len(), 2);
        assert_eq!(c.diagnostics().weighted_norms.len(), 5);
        assert_eq!(c.boundary(), Boundary::FarField);
        assert_eq!(c.output_dir, "out");
    }

    #[test]
    fn round_trip_is_identity() {
        let c: RunConfig = FULL.parse().unwrap();
        let text = c.to_config_string();
        let again: RunConfig = text.parse().unwrap();
        assert_eq!(again, c);
        assert_eq!(again.to_config_string(), text);

        let e = RunConfig::example();
        assert_eq!(e.to_config_string().parse::<RunConfig>().unwrap(), e);
    }

    #[test]
    fn floats_round_trip_exactly() {
        let mut c = RunConfig::example();
        c.params.alpha = 0.1 + 0.2 + 0.4;
        c.r_max = std::f64::consts::PI;
        c.t_end = 1.0 / 3.0;
        let again: RunConfig = c.to_config_string().parse().unwrap();
        assert_eq!(again.params.alpha.to_bits(), c.params.alpha.to_bits());
        assert_eq!(again.r_max.to_bits(), c.r_max.to_bits());
        assert_eq!(again.t_end.to_bits(), c.t_end.to_bits());
    }

    #[test]
    fn parse_errors_carry_line_context() {
        let bad = FULL.replace("n_cells = 256", "n_cells = many");
        match bad.parse::<RunConfig>() {
            Err(Error::Parse { line, context, .. }) => {
                assert_eq!(line, 14);
                assert!(context.contains("many"));
            }
            other => panic!("{other:?}"),
        }
        for (from, to) in [
            ("[grid]", "[mesh]"),
            ("r_max = 12", "r_maximum = 12"),
            ("r_max = 12", "r_max 12"),
            ("t_end = 0.25", "t_end = 0.25\nt_end = 0.5"),
        ] {
            assert!(matches!(FULL.replace(from, to).parse::<RunConfig>(), Err(Error::Parse { .. })), "{to}");
        }
        assert!(matches!("alpha = 1".parse::<RunConfig>(), Err(Error::Parse { .. })));
    }

    #[test]
    fn validation_errors_are_usage_errors() {
        let cases = [
            FULL.replace("eta = 0.5\n", ""),
            FULL.replace("eta = 0.5", "eta = 0.2"),
            FULL.replace("dim = 2", "dim = 3"),
            FULL.replace("n_cells = 256", "n_cells = 4"),
            FULL.replace("cfl = 0.3", "cfl = 1.5"),
            FULL.replace("k_moments = 2, 3.5", "k_moments = 1"),
            FULL.replace("t_end = 0.25", "t_end = 0"),
            FULL.replace("regime = cauchy-2d-weighted", "regime = ball-2d"),
            FULL.replace("alpha = 0.6", "alpha = 0.3"),
            FULL.replace("profile = gaussian", "profile = table"),
        ];
        for text in cases {
            let err = text.parse::<RunConfig>().unwrap_err();
            assert_eq!(err.exit_code(), 2, "{err}");
        }
    }

    #[test]
    fn eta_ignored_without_weighted_diagnostics() {
        let text = FULL
            .replace("regime = cauchy-2d-weighted", "regime = cauchy-2d")
            .replace("weighted = true", "weighted = false")
            .replace("eta = 0.5", "eta = 2");
        let c: RunConfig = text.parse().unwrap();
        assert!(c.admissibility().unwrap().violated_conditions.iter().all(|v| v != "eta_range"));
    }

    #[test]
    fn output_dir_env_override() {
        let c = RunConfig::example();
        // only this test touches the variable
        std::env::set_var(OUTPUT_DIR_ENV, "/tmp/override");
        assert_eq!(c.resolved_output_dir(), PathBuf::from("/tmp/override"));
        std::env::remove_var(OUTPUT_DIR_ENV);
        assert_eq!(c.resolved_output_dir(), PathBuf::from("out"));
    }

    #[test]
    fn table_profile_reads_relative_path() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("t.txt"), "# r rho u\n0 1.2 0\n1, 1.1, 0.1\n5 1 0\n").unwrap();
        let init = InitialConfig {
            profile: ProfileKind::Table,
            table: Some("t.txt".into()),
            ..InitialConfig::default()
        };
        match init.to_spec(Some(dir.path())).unwrap().density {
            DensityProfile::Table(rows) => assert_eq!(rows.len(), 3),
            other => panic!("{other:?}"),
        }
        std::fs::write(dir.path().join("bad.txt"), "0 1\n").unwrap();
        let init = InitialConfig { table: Some("bad.txt".into()), ..init };
        assert!(init.to_spec(Some(dir.path())).is_err());
    }

    #[test]
    fn ball_needs_reference_density() {
        let text = "[model]\ndim = 3\nalpha = 0.7\ngamma = 1.1\n[problem]\nregime = ball-3d\n\
                    [grid]\nn_cells = 32\nr_max = 1\n[run]\nt_end = 0.1\n";
        assert!(matches!(text.parse::<RunConfig>(), Err(Error::Usage(_))));
        let with_far = text.replace("gamma = 1.1", "gamma = 1.1\nfar_density = 2");
        assert_eq!(with_far.parse::<RunConfig>().unwrap().params.far_density, Some(2.0));
    }
}
