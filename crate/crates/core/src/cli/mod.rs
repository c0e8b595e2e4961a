//! Command-line driver: `thresholds`, `check`, `run` and `mms`.

pub mod config;
pub mod output;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::model::ConstitutiveSet;
use crate::params::{k1_residual, k2_residual, root_k1, root_k2};
use crate::solver::{self, Advection, SchemeConfig};
use crate::verification::{convergence_study, expected_order_band, ManufacturedCase};

pub use config::{AdmissibilityPolicy, RunConfig, OUTPUT_DIR_ENV};

#[derive(Debug, Parser)]
#[command(name = "radial-ns", version, about = "Radial compressible Navier-Stokes with degenerate viscosity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the exact alpha thresholds and the residuals of their cubics.
    Thresholds,
    /// Report whether a configuration lies in its admissibility window.
    Check {
        config: PathBuf,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Integrate a configuration and write diagnostics, snapshots and a manifest.
    Run { config: PathBuf },
    /// Grid-convergence study of the built-in manufactured solution.
    Mms {
        #[arg(long, default_value = "muscl-minmod")]
        scheme: String,
        #[arg(long, value_delimiter = ',', default_value = "128,256,512")]
        sizes: Vec<usize>,
        #[arg(long, value_enum, default_value_t = MmsCase::Builtin)]
        case: MmsCase,
        /// Also write the convergence CSV here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MmsCase {
    Builtin,
    /// Zero amplitudes; the exact solution is the far-field state.
    Constant,
}

/// Round to `digits` significant digits.
fn significant(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let magnitude = v.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{v:.decimals$}")
}

pub fn cmd_thresholds(out: &mut dyn Write) -> Result<i32> {
    let (k1, k2) = (root_k1(), root_k2());
    let lines = [
        ("k1", significant(k1, 10)),
        ("k1_cubic_residual", format!("{:e}", k1_residual(k1))),
        ("k2", significant(k2, 10)),
        ("k2_cubic_residual", format!("{:e}", k2_residual(k2))),
        ("alpha_min_2d", significant(1.0 - 2.0 / k1, 10)),
        ("alpha_min_2d_weighted", significant(9.0 - 6.0 * 2f64.sqrt(), 10)),
        ("alpha_min_3d", significant(1.0 - 1.0 / k2, 10)),
    ];
    for (k, v) in lines {
        writeln!(out, "{k} = {v}")?;
    }
    Ok(0)
}

pub fn cmd_check(path: &Path, json: bool, out: &mut dyn Write) -> Result<i32> {
    let config = RunConfig::from_file(path)?;
    let report = config.admissibility()?;
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    } else {
        write!(out, "{report}")?;
        writeln!(out, "policy: {}", config.policy)?;
    }
    let ok = report.admissible || config.policy == AdmissibilityPolicy::Warn;
    Ok(if ok { 0 } else { 1 })
}

/// Run `path` and write its artifacts. Returns the exit status: 1 when the
/// run stopped early.
pub fn cmd_run(path: &Path, out: &mut dyn Write) -> Result<i32> {
    let config = RunConfig::from_file(path)?;
    let base_dir = path.parent().map(Path::to_path_buf);
    let result = solver::run(&config, base_dir.as_deref())?;
    let dir = config.resolved_output_dir();
    std::fs::create_dir_all(&dir)?;
    clear_old_snapshots(&dir.join("snapshots"))?;

    let law = ConstitutiveSet::new(config.params);
    let diag = config.diagnostics();
    let tags: Vec<String> = diag.weighted_norms.iter().map(|n| n.tag()).collect();
    let mut files = vec![output::write_hashed(
        &dir,
        "diagnostics.csv",
        &output::diagnostics_csv(&diag.k_moments, &tags, &result.samples),
    )?];
    for (i, snap) in result.snapshots.iter().enumerate() {
        let text = output::snapshot_text(snap, &result.grid, &law)?;
        files.push(output::write_hashed(&dir, &format!("snapshots/snapshot_{i:05}.txt"), &text)?);
    }
    let manifest = output::Manifest::new(config.to_config_string(), &result, files);
    std::fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;

    for w in &result.warnings {
        writeln!(out, "warning: {w}")?;
    }
    writeln!(out, "output: {}", dir.display())?;
    writeln!(out, "steps: {}", result.steps)?;
    writeln!(out, "rho range: [{}, {}]", result.global_min_rho, result.global_max_rho)?;
    writeln!(out, "content hash: {}", manifest.content_hash)?;
    match &result.failure {
        None => Ok(0),
        Some(f) => {
            writeln!(out, "run stopped at step {} (t = {}): {}", f.step_index, f.time, f.reason)?;
            Ok(1)
        }
    }
}

fn clear_old_snapshots(dir: &Path) -> Result<()> {
    let Ok(entries) = std::fs::read_dir(dir) else {
        return Ok(());
    };
    for entry in entries {
        let path = entry?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
        if name.starts_with("snapshot_") && name.ends_with(".txt") {
            std::fs::remove_file(&path)?;
        }
    }
    Ok(())
}

pub fn cmd_mms(scheme: &str, sizes: &[usize], case: MmsCase, output: Option<&Path>, out: &mut dyn Write) -> Result<i32> {
    let advection: Advection = match scheme {
        "muscl" => Advection::MusclMinmod,
        other => other.parse()?,
    };
    let scheme = SchemeConfig::default().with_advection(advection);
    let case = match case {
        MmsCase::Builtin => ManufacturedCase::builtin(),
        MmsCase::Constant => ManufacturedCase::constant(),
    };
    let report = convergence_study(&case, &scheme, sizes)?;
    let csv = report.to_csv();
    if let Some(path) = output {
        std::fs::write(path, &csv)?;
    }
    write!(out, "{csv}")?;
    let band = expected_order_band(advection);
    let pass = report.within(band);
    writeln!(
        out,
        "{}: {} order band [{}, {}]",
        if pass { "PASS" } else { "FAIL" },
        advection,
        band.0,
        band.1
    )?;
    Ok(if pass { 0 } else { 1 })
}

/// Entry point shared by the binary; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = match cli.command {
        Command::Thresholds => cmd_thresholds(&mut out),
        Command::Check { config, json } => cmd_check(&config, json, &mut out),
        Command::Run { config } => cmd_run(&config, &mut out),
        Command::Mms { scheme, sizes, case, output } => cmd_mms(&scheme, &sizes, case, output.as_deref(), &mut out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

impl From<std::fmt::Error> for Error {
    fn from(e: std::fmt::Error) -> Self {
        Error::Io(std::io::Error::other(e))
    }
}
