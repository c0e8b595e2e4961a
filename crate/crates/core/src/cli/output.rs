//! On-disk formats: diagnostics CSV, snapshot files and the run manifest.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use sha1::{Digest, Sha1};

use crate::diagnostics::DiagnosticsSample;
use crate::error::{Error, Result};
use crate::grid::{FluidState, RadialGrid};
use crate::model::ConstitutiveSet;
use crate::params::AdmissibilityReport;
use crate::solver::RunOutput;

pub const SNAPSHOT_FORMAT_VERSION: u32 = 1;

/// 17 significant digits, enough to read every `f64` back exactly.
pub fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn csv_header(k_moments: &[f64], norm_tags: &[String]) -> Vec<String> {
    let mut cols: Vec<String> = [
        "t",
        "dt",
        "min_rho",
        "max_rho",
        "kinetic",
        "potential",
        "bd_kinetic",
        "bd_dissipation_rate",
        "energy_residual",
        "bd_residual",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    cols.extend(k_moments.iter().map(|k| format!("k_moment_{k}")));
    cols.extend(norm_tags.iter().map(|t| format!("wnorm_{t}")));
    cols.push("boundary_contamination".to_string());
    cols
}

pub fn csv_row(s: &DiagnosticsSample) -> Vec<f64> {
    let mut row = vec![
        s.time,
        s.dt,
        s.min_rho,
        s.max_rho,
        s.kinetic_energy,
        s.potential_energy_total,
        s.bd_kinetic,
        s.bd_dissipation_rate,
        s.energy_balance_residual,
        s.bd_balance_residual,
    ];
    row.extend(s.k_moments.iter().map(|(_, v)| *v));
    row.extend(s.weighted_norms.iter().map(|(_, v)| *v));
    row.push(s.boundary_contamination);
    row
}

pub fn diagnostics_csv(k_moments: &[f64], norm_tags: &[String], samples: &[DiagnosticsSample]) -> String {
    let mut out = csv_header(k_moments, norm_tags).join(",");
    out.push('\n');
    for s in samples {
        let row: Vec<String> = csv_row(s).into_iter().map(fmt_value).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Parse a diagnostics CSV back into its header and numeric rows.
pub fn read_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::usage("empty CSV"))?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        let row = line
            .split(',')
            .map(|v| v.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse { line: k + 2, msg: e.to_string(), context: line.to_string() })?;
        if row.len() != header.len() {
            return Err(Error::Parse { line: k + 2, msg: "wrong number of columns".into(), context: line.to_string() });
        }
        rows.push(row);
    }
    Ok((header, rows))
}

/// Snapshot text: `# key = value` header lines, then `r,rho,u,w` rows.
pub fn snapshot_text(state: &FluidState, grid: &RadialGrid, law: &ConstitutiveSet) -> Result<String> {
    let p = &law.params;
    let w = law.effective_velocity(grid, &state.rho, &state.u)?;
    let mut out = String::new();
    let far = p.far_density.map(|v| format!("{v}")).unwrap_or_else(|| "none".into());
    for (k, v) in [
        ("format_version", SNAPSHOT_FORMAT_VERSION.to_string()),
        ("dim", p.dim.to_string()),
        ("alpha", format!("{}", p.alpha)),
        ("gamma", format!("{}", p.gamma)),
        ("pressure_coeff", format!("{}", p.pressure_coeff)),
        ("far_density", far),
        ("n_cells", grid.n_cells.to_string()),
        ("r_max", format!("{}", grid.r_max)),
        ("time", format!("{}", state.time)),
    ] {
        let _ = writeln!(out, "# {k} = {v}");
    }
    out.push_str("r,rho,u,w\n");
    for i in 0..grid.n_cells {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_value(grid.centers[i]),
            fmt_value(state.rho[i]),
            fmt_value(state.u[i]),
            fmt_value(w[i])
        );
    }
    Ok(out)
}

/// A parsed snapshot file.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub header: Vec<(String, String)>,
    pub r: Vec<f64>,
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    pub w: Vec<f64>,
}

impl Snapshot {
    pub fn header_value(&self, key: &str) -> Option<&str> {
        self.header.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

pub fn read_snapshot(text: &str) -> Result<Snapshot> {
    let mut snap = Snapshot { header: Vec::new(), r: Vec::new(), rho: Vec::new(), u: Vec::new(), w: Vec::new() };
    let mut seen_columns = false;
    for (k, line) in text.lines().enumerate() {
        let bad = |msg: &str| Error::Parse { line: k + 1, msg: msg.to_string(), context: line.to_string() };
        if let Some(rest) = line.strip_prefix('#') {
            let (key, value) = rest.split_once('=').ok_or_else(|| bad("header needs '# key = value'"))?;
            snap.header.push((key.trim().to_string(), value.trim().to_string()));
        } else if !seen_columns {
            if line.trim() != "r,rho,u,w" {
                return Err(bad("expected column line r,rho,u,w"));
            }
            seen_columns = true;
        } else {
            let vals = line
                .split(',')
                .map(|v| v.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| bad(&e.to_string()))?;
            if vals.len() != 4 {
                return Err(bad("snapshot rows need four columns"));
            }
            snap.r.push(vals[0]);
            snap.rho.push(vals[1]);
            snap.u.push(vals[2]);
            snap.w.push(vals[3]);
        }
    }
    Ok(snap)
}

/// SHA-1 of `blob <len>\0<content>`, as `git hash-object` computes it.
pub fn git_blob_hash(content: &[u8]) -> String {
    let mut h = Sha1::new();
    h.update(format!("blob {}\0", content.len()).as_bytes());
    h.update(content);
    hex(&h.finalize())
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Serialize)]
pub struct FileHash {
    pub path: String,
    pub sha1: String,
}

#[derive(Debug, Serialize)]
pub struct ManifestFailure {
    pub step_index: usize,
    pub time: f64,
    pub reason: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub program: String,
    pub version: String,
    pub config: String,
    pub admissibility: AdmissibilityReport,
    pub warnings: Vec<String>,
    pub status: String,
    pub failure: Option<ManifestFailure>,
    pub steps: usize,
    pub rejected_steps: usize,
    pub final_time: f64,
    pub global_min_rho: f64,
    pub global_max_rho: f64,
    pub max_boundary_contamination: f64,
    pub files: Vec<FileHash>,
    /// Hash over the `path sha1` lines of all files.
    pub content_hash: String,
}

impl Manifest {
    pub fn new(config_text: String, out: &RunOutput, files: Vec<FileHash>) -> Self {
        let listing: String = files.iter().map(|f| format!("{} {}\n", f.sha1, f.path)).collect();
        Manifest {
            program: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config_text,
            admissibility: out.admissibility.clone(),
            warnings: out.warnings.clone(),
            status: if out.failure.is_some() { "failed" } else { "completed" }.to_string(),
            failure: out.failure.as_ref().map(|f| ManifestFailure {
                step_index: f.step_index,
                time: f.time,
                reason: f.reason.clone(),
            }),
            steps: out.steps,
            rejected_steps: out.rejected_steps,
            final_time: out.final_state.time,
            global_min_rho: out.global_min_rho,
            global_max_rho: out.global_max_rho,
            max_boundary_contamination: out.max_boundary_contamination,
            files,
            content_hash: git_blob_hash(listing.as_bytes()),
        }
    }
}

/// Write `content` to `dir/rel` and return its hash entry.
pub fn write_hashed(dir: &Path, rel: &str, content: &str) -> Result<FileHash> {
    let path = dir.join(rel);
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(&path, content)?;
    Ok(FileHash { path: rel.to_string(), sha1: git_blob_hash(content.as_bytes()) })
}
