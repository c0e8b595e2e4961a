//! Run driver: integrate a configuration to `t_end`, sampling diagnostics
//! and snapshots on fixed time grids.

use std::path::Path;

use crate::cli::config::{AdmissibilityPolicy, RunConfig};
use crate::diagnostics::{sample_all, sample_with_step, DiagnosticsSample};
use crate::error::{Error, Result};
use crate::grid::{make_initial_data, FluidState, RadialGrid};
use crate::model::ConstitutiveSet;
use crate::params::AdmissibilityReport;

use super::Stepper;

/// Where and why an integration stopped early.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    /// Index of the failing step, counting from 0.
    pub step_index: usize,
    pub time: f64,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub grid: RadialGrid,
    pub admissibility: AdmissibilityReport,
    pub warnings: Vec<String>,
    pub samples: Vec<DiagnosticsSample>,
    pub snapshots: Vec<FluidState>,
    pub final_state: FluidState,
    pub steps: usize,
    pub rejected_steps: usize,
    pub failure: Option<RunFailure>,
    /// Density extrema over every accepted state of the run.
    pub global_min_rho: f64,
    pub global_max_rho: f64,
    pub max_boundary_contamination: f64,
}

/// Event times `every, 2 every, ...` strictly below `t_end`, then `t_end`.
fn event_times(every: f64, t_end: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut k = 1usize;
    loop {
        let t = k as f64 * every;
        if t >= t_end * (1.0 - 1e-12) {
            break;
        }
        out.push(t);
        k += 1;
    }
    out.push(t_end);
    out
}

fn contains_time(times: &[f64], t: f64) -> bool {
    times.binary_search_by(|x| x.total_cmp(&t)).is_ok()
}

/// Integrate `config`. Table paths are resolved against `base_dir`.
///
/// Configuration problems are errors. A rejected step or a non-finite
/// field ends the run early and is reported in [`RunOutput::failure`].
pub fn run(config: &RunConfig, base_dir: Option<&Path>) -> Result<RunOutput> {
    config.validate()?;
    let admissibility = config.admissibility()?;
    let mut warnings = Vec::new();
    if !admissibility.admissible {
        match config.policy {
            AdmissibilityPolicy::Enforce => {
                return Err(Error::Inadmissible(admissibility.violated_conditions.join("; ")));
            }
            AdmissibilityPolicy::Warn => warnings.push(format!(
                "parameters outside the admissibility window: {}",
                admissibility.violated_conditions.join("; ")
            )),
        }
    }

    let grid = RadialGrid::new(config.n_cells, config.r_max, config.params.dim)?;
    let spec = config.initial.to_spec(base_dir)?;
    let (initial, init_warnings) = make_initial_data(&spec, &grid, &config.params, config.boundary())?;
    warnings.extend(init_warnings);

    let law = ConstitutiveSet::new(config.params);
    let diag = config.diagnostics();
    let mut stepper = Stepper::new(&grid, config.params, config.scheme)?;

    let sample_times = event_times(config.sample_every, config.t_end);
    let snapshot_times = event_times(config.snapshot_every, config.t_end);
    let mut events: Vec<f64> = sample_times.iter().chain(&snapshot_times).copied().collect();
    events.sort_by(f64::total_cmp);
    events.dedup();

    let (mut lo, mut hi) = initial.density_extrema();
    let mut samples = Vec::new();
    let mut snapshots = vec![initial.clone()];
    let mut max_contamination: f64 = 0.0;
    let mut failure = None;
    let mut rejected = 0;
    let mut steps = 0;
    let mut state = initial.clone();
    let mut next_event = 0;

    while next_event < events.len() {
        let target = events[next_event];
        let cap = target - state.time;
        let outcome = stepper.step_capped(&state, cap);
        let (mut next, report) = match outcome {
            Ok(pair) => pair,
            Err(Error::NonFinite(msg)) => {
                failure = Some(RunFailure { step_index: steps, time: state.time, reason: format!("non-finite value: {msg}") });
                break;
            }
            Err(e) => return Err(e),
        };
        if !report.step_accepted {
            rejected += 1;
            failure = Some(RunFailure {
                step_index: steps,
                time: state.time,
                reason: report.rejection.unwrap_or_else(|| "step rejected".to_string()),
            });
            break;
        }
        let hit = report.dt_used >= cap;
        if hit {
            next.time = target;
        }
        if steps == 0 {
            samples.push(sample_with_step(&initial, &initial, &next, &grid, &law, &diag)?);
        }
        steps += 1;
        lo = lo.min(report.min_rho);
        hi = hi.max(report.max_rho);
        max_contamination = max_contamination.max(report.boundary_contamination);
        if hit {
            if contains_time(&sample_times, target) {
                samples.push(sample_all(&state, &next, &grid, &law, &diag)?);
            }
            if contains_time(&snapshot_times, target) {
                snapshots.push(next.clone());
            }
            next_event += 1;
        }
        state = next;
    }

    Ok(RunOutput {
        grid,
        admissibility,
        warnings,
        samples,
        snapshots,
        final_state: state,
        steps,
        rejected_steps: rejected,
        failure,
        global_min_rho: lo,
        global_max_rho: hi,
        max_boundary_contamination: max_contamination,
    })
}
