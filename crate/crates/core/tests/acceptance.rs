//! Acceptance criteria. Each test prints one `criterion N ... PASS|FAIL` line.

use std::io::Write;
use std::path::Path;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use radial_ns::cli::config::ProfileKind;
use radial_ns::cli::output::{read_snapshot, Snapshot};
use radial_ns::cli::{self, RunConfig};
use radial_ns::model::{ConstitutiveSet, EffectiveVelocityForm};
use radial_ns::params::{f2, g3, root_k1, root_k2};
use radial_ns::solver::{self, Advection, RunOutput, Stepper, ViscousTreatment};
use radial_ns::verification::{adaptive_quadrature, convergence_study, expected_order_band, ManufacturedCase};
use radial_ns::{Boundary, FluidState, InitialDataSpec, ModelParams, RadialGrid, Regime, SchemeConfig};

/// Print the verdict line and fail the test when `checks` has a failure.
fn report(id: u32, name: &str, elapsed: Duration, budget: Duration, checks: Vec<(bool, String)>) {
    let in_time = elapsed <= budget;
    let pass = in_time && checks.iter().all(|(ok, _)| *ok);
    let details: Vec<String> = checks
        .iter()
        .map(|(ok, msg)| format!("{}{msg}", if *ok { "" } else { "!! " }))
        .collect();
    // written to the raw handle so the line survives the harness capture
    let line = format!(
        "criterion {id} ({name}): {}  [{:.3?} of {:?}] {}\n",
        if pass { "PASS" } else { "FAIL" },
        elapsed,
        budget,
        details.join("; ")
    );
    let _ = std::io::stdout().lock().write_all(line.as_bytes());
    assert!(pass, "criterion {id} failed");
}

#[test]
fn criterion_01_threshold_reproduction() {
    let start = Instant::now();
    let (k1, k2) = (root_k1(), root_k2());
    let planar = 1.0 - 2.0 / k1;
    let spatial = 1.0 - 1.0 / k2;
    let weighted = 9.0 - 6.0 * 2f64.sqrt();
    let elapsed = start.elapsed();
    let tol = 5e-6;
    let check = |name: &str, v: f64, published: f64| {
        let diff = (v - published).abs();
        (diff <= tol, format!("{name} = {v:.10} vs {published}: |diff| = {diff:.3e} (tol {tol:e})"))
    };
    report(
        1,
        "threshold reproduction",
        elapsed,
        Duration::from_millis(1),
        vec![
            check("1-2/k1", planar, 0.54369),
            check("1-1/k2", spatial, 0.67661),
            check("9-6sqrt2", weighted, 0.51472),
        ],
    );
}

#[test]
fn criterion_02_identity_suite() {
    let start = Instant::now();
    let (k1, k2) = (root_k1(), root_k2());
    let mut checks = Vec::new();

    let d12 = (f2(k1).unwrap() - (1.0 - 2.0 / k1)).abs();
    checks.push((d12 < 1e-9, format!("f2(k1) identity {d12:.2e}")));
    let d21 = (g3(k2).unwrap() - (1.0 - 1.0 / k2)).abs();
    checks.push((d21 < 1e-9, format!("g3(k2) identity {d21:.2e}")));

    let grid: Vec<f64> = std::iter::once(2.01).chain((1..=480).map(|i| 2.0 + 0.1 * i as f64)).collect();
    let above_k1 = grid.iter().filter(|&&k| k > k1);
    let k13 = above_k1.clone().all(|&k| f2(k).unwrap() < 1.0 - 2.0 / k);
    checks.push((k13, format!("f2(k) < 1-2/k on {} k > k1", above_k1.count())));
    let above_k2 = grid.iter().filter(|&&k| k > k2);
    let k22 = above_k2.clone().all(|&k| g3(k).unwrap() < 1.0 - 1.0 / k);
    checks.push((k22, format!("g3(k) < 1-1/k on {} k > k2", above_k2.count())));

    let worst_f2 = grid
        .iter()
        .map(|&k| (f2(k).unwrap() - k / (k + 2.0 * (k - 1.0).sqrt())).abs())
        .fold(0.0, f64::max);
    checks.push((worst_f2 < 1e-12, format!("f2 = k/(k+2sqrt(k-1)) {worst_f2:.2e}")));

    let mut worst_bd: f64 = 0.0;
    for alpha in [0.55, 0.7, 0.9] {
        let law = ConstitutiveSet::new(ModelParams::new(2, alpha, 1.5, Some(1.0)).unwrap());
        for e in -3..=3 {
            let rho = 10f64.powi(e);
            let (mu, lambda) = law.viscosities(rho).unwrap();
            let bd = law.shear_derivative(rho).unwrap() * rho - mu;
            worst_bd = worst_bd.max((lambda - bd).abs() / lambda.abs());
        }
    }
    checks.push((worst_bd < 1e-14, format!("BD relation rel {worst_bd:.2e}")));
    report(2, "identity suite", start.elapsed(), Duration::from_secs(1), checks);
}

#[test]
fn criterion_03_potential_energy_closed_form() {
    let start = Instant::now();
    let mut checks = Vec::new();
    for gamma in [1.2, 2.0, 3.0] {
        let params = ModelParams::new(3, 0.7, gamma, Some(1.0)).unwrap();
        let law = ConstitutiveSet::new(params);
        let rhos: Vec<f64> = (0..40).map(|i| 1e-3 * (5.0f64 / 1e-3).powf(i as f64 / 39.0)).collect();
        let mut worst: f64 = 0.0;
        for &rho in &rhos {
            let integrand = |s: f64| (law.pressure(s).unwrap() - law.pressure(1.0).unwrap()) / (s * s);
            let (lo, hi, sign) = if rho < 1.0 { (rho, 1.0, -1.0) } else { (1.0, rho, 1.0) };
            // a coarse pass sets the scale for a relative tolerance
            let rough = adaptive_quadrature(&integrand, (lo, hi), 1e-6).unwrap();
            let tol = 1e-12 * rough.abs().max(1e-300);
            let oracle = rho * sign * adaptive_quadrature(&integrand, (lo, hi), tol).unwrap();
            let closed = law.potential_energy(rho).unwrap();
            worst = worst.max((closed - oracle).abs() / oracle.abs());
        }
        checks.push((worst < 1e-8, format!("gamma {gamma}: rel {worst:.2e}")));

        let zero = law.potential_energy(1.0).unwrap();
        checks.push((zero == 0.0, format!("K(far) = {zero}")));

        let k: Vec<f64> = rhos.iter().map(|&r| law.potential_energy(r).unwrap()).collect();
        let slopes: Vec<f64> = (1..40).map(|i| (k[i] - k[i - 1]) / (rhos[i] - rhos[i - 1])).collect();
        let convex = slopes.windows(2).all(|w| w[1] >= w[0]) && k.iter().all(|&v| v >= 0.0);
        checks.push((convex, format!("gamma {gamma}: convex and nonnegative")));
    }
    report(3, "potential energy closed form", start.elapsed(), Duration::from_secs(1), checks);
}

/// Smooth even density and odd velocity with random coefficients.
fn random_state(rng: &mut ChaCha8Rng) -> (impl Fn(f64) -> f64, impl Fn(f64) -> f64) {
    let (a1, b1) = (rng.gen_range(-0.4..0.8), rng.gen_range(0.3..2.0));
    let (a2, b2) = (rng.gen_range(-0.3..0.3), rng.gen_range(0.5..2.0));
    let (c1, d1) = (rng.gen_range(-1.0..1.0), rng.gen_range(0.3..2.0));
    let (c2, d2) = (rng.gen_range(-0.5..0.5), rng.gen_range(0.5..2.0));
    let rho = move |r: f64| 1.0 + a1 * (-b1 * r * r).exp() + a2 * r * r * (-b2 * r * r).exp();
    let u = move |r: f64| c1 * r * (-d1 * r * r).exp() + c2 * r * r * r * (-d2 * r * r).exp();
    (rho, u)
}

#[test]
fn criterion_04_effective_velocity_forms() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20240601);
    let law = ConstitutiveSet::new(ModelParams::new(3, 0.7, 1.1, Some(1.0)).unwrap());
    let mut worst_order = f64::INFINITY;
    for _ in 0..20 {
        let (rho_f, u_f) = random_state(&mut rng);
        let gap = |n: usize| {
            let g = RadialGrid::new(n, 8.0, 3).unwrap();
            let rho: Vec<f64> = g.centers.iter().map(|&r| rho_f(r)).collect();
            let u: Vec<f64> = g.centers.iter().map(|&r| u_f(r)).collect();
            assert!(rho.iter().all(|&v| v > 0.0));
            let state = FluidState::new(0.0, rho.clone(), u.clone(), Boundary::FarField).unwrap();
            let w = law.effective_velocity(&g, &rho, &u).unwrap();
            let wt = vec![0.0; n];
            let a = law.effective_velocity_residual(&g, &state, &w, &wt, EffectiveVelocityForm::Transport).unwrap();
            let b = law.effective_velocity_residual(&g, &state, &w, &wt, EffectiveVelocityForm::Damped).unwrap();
            a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
        };
        let order = (gap(256) / gap(512)).log2();
        worst_order = worst_order.min(order);
    }
    report(
        4,
        "effective-velocity form equivalence",
        start.elapsed(),
        Duration::from_secs(5),
        vec![(worst_order >= 1.8, format!("min observed order over 20 states {worst_order:.3}"))],
    );
}

#[test]
fn criterion_05_exact_equilibrium() {
    let start = Instant::now();
    let mut checks = Vec::new();
    let far = 1.3;
    for dim in [2, 3] {
        for boundary in [Boundary::FarField, Boundary::Wall] {
            for viscous in [ViscousTreatment::Explicit, ViscousTreatment::SemiImplicit] {
                let grid = RadialGrid::new(64, 5.0, dim).unwrap();
                let params = ModelParams::new(dim, 0.7, 1.1, Some(far)).unwrap();
                let scheme = SchemeConfig::default().with_viscous(viscous);
                let mut stepper = Stepper::new(&grid, params, scheme).unwrap();
                let mut s = FluidState::constant(&grid, far, boundary).unwrap();
                for _ in 0..1000 {
                    s = stepper.step(&s, None).unwrap().0;
                }
                let dev = s
                    .rho
                    .iter()
                    .map(|r| (r - far).abs())
                    .chain(s.u.iter().map(|v| v.abs()))
                    .fold(0.0, f64::max);
                checks.push((dev <= 1e-13, format!("N={dim} {boundary} {viscous}: {dev:.1e}")));
            }
        }
    }
    report(5, "exact equilibrium", start.elapsed(), Duration::from_secs(5), checks);
}

#[test]
fn criterion_06_ball_mass_conservation() {
    let start = Instant::now();
    let grid = RadialGrid::new(256, 4.0, 3).unwrap();
    let params = ModelParams::new(3, 0.7, 1.1, Some(1.0)).unwrap();
    let spec = InitialDataSpec::gaussian(0.5, 1.0, 0.5).with_velocity(0.3, 1.0);
    let (mut s, _) = radial_ns::grid::make_initial_data(&spec, &grid, &params, Boundary::Wall).unwrap();
    let m0 = s.total_mass(&grid);
    let mut stepper = Stepper::new(&grid, params, SchemeConfig::default()).unwrap();
    for _ in 0..1000 {
        let (next, report) = stepper.step(&s, None).unwrap();
        assert!(report.step_accepted);
        s = next;
    }
    let drift = (s.total_mass(&grid) - m0).abs() / m0;
    report(
        6,
        "ball mass conservation",
        start.elapsed(),
        Duration::from_secs(10),
        vec![(drift < 1e-11, format!("relative drift {drift:.2e} after 1000 steps to t = {:.4}", s.time))],
    );
}

#[test]
fn criterion_07_mms_convergence() {
    let start = Instant::now();
    let case = ManufacturedCase::builtin();
    let mut checks = Vec::new();
    for advection in [Advection::MusclMinmod, Advection::Upwind1] {
        let scheme = SchemeConfig::default().with_advection(advection);
        let report = convergence_study(&case, &scheme, &[128, 256, 512]).unwrap();
        let band = expected_order_band(advection);
        checks.push((
            report.within(band),
            format!(
                "{advection}: order rho {:.3}, u {:.3} in [{}, {}]",
                report.order_rho, report.order_u, band.0, band.1
            ),
        ));
    }
    report(7, "manufactured-solution convergence", start.elapsed(), Duration::from_secs(120), checks);
}

fn desk_config(n_cells: usize) -> RunConfig {
    let mut c = RunConfig::example();
    c.params = ModelParams::new(3, 0.7, 1.1, Some(1.0)).unwrap();
    c.regime = Regime::Cauchy3d;
    c.n_cells = n_cells;
    c.r_max = 8.0;
    c.t_end = 0.5;
    c.sample_every = 0.05;
    c.snapshot_every = 0.5;
    c.initial.profile = ProfileKind::Gaussian;
    c.initial.amplitude = -0.5;
    c.initial.center = 0.0;
    c.initial.width = 1.0;
    c.initial.velocity_amplitude = 0.5;
    c.initial.velocity_width = 1.0;
    c
}

struct DeskRuns {
    coarse: RunOutput,
    fine: RunOutput,
    elapsed: Duration,
}

fn desk_runs() -> &'static DeskRuns {
    static RUNS: OnceLock<DeskRuns> = OnceLock::new();
    RUNS.get_or_init(|| {
        let start = Instant::now();
        let (coarse, fine) = std::thread::scope(|s| {
            let a = s.spawn(|| solver::run(&desk_config(512), None).unwrap());
            let b = s.spawn(|| solver::run(&desk_config(1024), None).unwrap());
            (a.join().unwrap(), b.join().unwrap())
        });
        DeskRuns { coarse, fine, elapsed: start.elapsed() }
    })
}

fn max_of(out: &RunOutput, f: impl Fn(&radial_ns::diagnostics::DiagnosticsSample) -> f64) -> f64 {
    out.samples.iter().map(f).fold(0.0, f64::max)
}

/// Largest increase of the BD functional between samples, in units of the
/// residual scale times the sampling interval.
fn bd_excess(out: &RunOutput) -> f64 {
    let scale = max_of(out, |s| s.bd_balance_residual);
    let functional: Vec<(f64, f64)> = out.samples.iter().map(|s| (s.time, s.bd_kinetic + s.potential_energy_total)).collect();
    functional
        .windows(2)
        .map(|w| (w[1].1 - w[0].1) / (scale * (w[1].0 - w[0].0)))
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn criterion_08_balance_identities() {
    let runs = desk_runs();
    let (c, f) = (&runs.coarse, &runs.fine);
    let mut checks = Vec::new();
    let completed = c.failure.is_none() && f.failure.is_none();
    checks.push((completed, format!("steps {} / {}", c.steps, f.steps)));
    let dt_ratio = f.steps as f64 / c.steps as f64;
    checks.push(((3.6..=4.4).contains(&dt_ratio), format!("step-count ratio {dt_ratio:.3}")));
    for (name, get) in [
        ("energy", (|s: &radial_ns::diagnostics::DiagnosticsSample| s.energy_balance_residual) as fn(&_) -> f64),
        ("bd", |s| s.bd_balance_residual),
    ] {
        let (rc, rf) = (max_of(c, get), max_of(f, get));
        let ratio = rc / rf;
        checks.push((ratio >= 3.0, format!("{name} residual {rc:.3e} -> {rf:.3e} (x{ratio:.2})")));
    }
    for (label, out) in [("512", c), ("1024", f)] {
        let excess = bd_excess(out);
        checks.push((excess <= 1.0, format!("BD functional increase at {label} <= {excess:.3} residual scale")));
    }
    report(8, "balance identities", runs.elapsed, Duration::from_secs(300), checks);
}

#[test]
fn criterion_09_vacuum_non_formation() {
    let runs = desk_runs();
    let c = &runs.coarse;
    let lo = c.samples.iter().map(|s| s.min_rho).fold(f64::INFINITY, f64::min);
    let hi = c.samples.iter().map(|s| s.max_rho).fold(0.0, f64::max);
    let checks = vec![
        (c.samples.iter().all(|s| s.min_rho > 0.0) && lo > 0.0, format!("min rho over samples {lo:.6}")),
        (hi.is_finite(), format!("max rho over samples {hi:.6}")),
        (c.rejected_steps == 0 && c.failure.is_none(), format!("rejected steps {}", c.rejected_steps)),
        (c.global_min_rho > 0.0, format!("min rho over all steps {:.6}", c.global_min_rho)),
    ];
    report(9, "vacuum non-formation", runs.elapsed, Duration::from_secs(300), checks);
}

fn run_into(config: &RunConfig, dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut c = config.clone();
    c.output_dir = dir.join("out").to_string_lossy().into_owned();
    let path = dir.join("run.cfg");
    std::fs::write(&path, c.to_config_string()).unwrap();
    let mut sink = Vec::new();
    assert_eq!(cli::cmd_run(&path, &mut sink).unwrap(), 0);
    let mut files = Vec::new();
    let root = dir.join("out");
    let mut stack = vec![root.clone()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(&root).unwrap().to_string_lossy().into_owned();
                files.push((rel, std::fs::read(&p).unwrap()));
            }
        }
    }
    files.sort();
    files
}

fn snapshot_w_gap(snap: &Snapshot) -> f64 {
    let get = |k: &str| snap.header_value(k).unwrap().parse::<f64>().unwrap();
    let dim = get("dim") as usize;
    let params = ModelParams::new(dim, get("alpha"), get("gamma"), Some(get("far_density")))
        .unwrap()
        .with_pressure_coeff(get("pressure_coeff"))
        .unwrap();
    let grid = RadialGrid::new(get("n_cells") as usize, get("r_max"), dim).unwrap();
    let w = ConstitutiveSet::new(params).effective_velocity(&grid, &snap.rho, &snap.u).unwrap();
    w.iter().zip(&snap.w).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

#[test]
fn criterion_10_determinism_and_formats() {
    let start = Instant::now();
    let mut checks = Vec::new();

    let mut configs = vec![RunConfig::example(), desk_config(96)];
    let mut planar = desk_config(64);
    planar.params = ModelParams::new(2, 0.6, 3.0, Some(0.8)).unwrap();
    planar.regime = Regime::Cauchy2dWeighted;
    planar.eta = Some(0.5);
    planar.weighted = true;
    planar.k_moments = vec![2.0, 3.5];
    configs.push(planar);
    let round_trip = configs.iter().all(|c| {
        let text = c.to_config_string();
        let back: RunConfig = text.parse().unwrap();
        back == *c && back.to_config_string() == text
    });
    checks.push((round_trip, format!("{} configs round-trip", configs.len())));

    let mut config = desk_config(96);
    config.t_end = 0.05;
    config.sample_every = 0.01;
    config.snapshot_every = 0.025;
    // the manifest echoes the output directory, so both runs share one
    let dir = tempfile::tempdir().unwrap();
    let first = run_into(&config, dir.path());
    let second = run_into(&config, dir.path());
    let identical = first == second && !first.is_empty();
    checks.push((identical, format!("{} output files byte-identical", first.len())));

    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (name, bytes) in &first {
        if name.contains("snapshot_") {
            let snap = read_snapshot(std::str::from_utf8(bytes).unwrap()).unwrap();
            worst = worst.max(snapshot_w_gap(&snap));
            count += 1;
        }
    }
    checks.push((count > 0 && worst <= 1e-12, format!("w column of {count} snapshots within {worst:.1e}")));
    report(10, "determinism and formats", start.elapsed(), Duration::from_secs(10), checks);
}
