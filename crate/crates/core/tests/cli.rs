use std::path::Path;
use std::process::{Command, Output};

use radial_ns::cli::output::{read_csv, read_snapshot};

fn radial_ns(args: &[&str], env_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_radial-ns"));
    cmd.args(args).env_remove("RADIAL_NS_OUTPUT_DIR");
    if let Some(dir) = env_dir {
        cmd.env("RADIAL_NS_OUTPUT_DIR", dir);
    }
    cmd.output().expect("spawn radial-ns")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn bump(out_dir: &Path, model: &str, problem: &str) -> String {
    format!(
        "[model]\n{model}\n\n[problem]\n{problem}\n\n[grid]\nn_cells = 64\nr_max = 6\n\n\
         [initial]\nprofile = gaussian\namplitude = 0.3\nwidth = 0.8\nvelocity_amplitude = 0.2\n\n\
         [run]\nt_end = 0.02\nsample_every = 0.005\nsnapshot_every = 0.01\n\n\
         [diagnostics]\nk_moments = 2, 4\n\n[output]\ndir = {}\n",
        out_dir.display()
    )
}

const SPATIAL: &str = "dim = 3\nalpha = 0.7\ngamma = 1.1";

#[test]
fn thresholds_prints_every_line() {
    let o = radial_ns(&["thresholds"], None);
    assert!(o.status.success());
    let text = stdout(&o);
    for line in [
        "k1 = 4.382975768",
        "k2 = 3.092193586",
        "alpha_min_2d = 0.5436890127",
        "alpha_min_2d_weighted = 0.5147186258",
        "alpha_min_3d = 0.6766049821",
    ] {
        assert!(text.lines().any(|l| l == line), "missing {line:?} in\n{text}");
    }
    let residual: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("k2_cubic_residual = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(residual.abs() < 1e-12);
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");

    let ok = write_config(dir.path(), "ok.cfg", &bump(&out, SPATIAL, "regime = cauchy-3d\npolicy = enforce"));
    let o = radial_ns(&["check", &ok], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("admissible: true"));

    // gamma = 6 alpha - 3 sits on the open boundary
    let edge = write_config(
        dir.path(),
        "edge.cfg",
        &bump(&out, "dim = 3\nalpha = 0.75\ngamma = 1.5", "regime = cauchy-3d\npolicy = enforce"),
    );
    let o = radial_ns(&["check", &edge, "--json"], None);
    assert_eq!(o.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["admissible"], false);
    assert_eq!(report["regime"], "cauchy-3d");

    let warn = write_config(
        dir.path(),
        "warn.cfg",
        &bump(&out, "dim = 3\nalpha = 0.75\ngamma = 1.5", "regime = cauchy-3d\npolicy = warn"),
    );
    assert_eq!(radial_ns(&["check", &warn], None).status.code(), Some(0));

    let planar = "dim = 2\nalpha = 0.6\ngamma = 2";
    let text = bump(&out, planar, "regime = cauchy-2d").replace("k_moments = 2, 4", "weighted = true");
    let no_eta = write_config(dir.path(), "no_eta.cfg", &text);
    assert_eq!(radial_ns(&["check", &no_eta], None).status.code(), Some(2));

    let typo = write_config(dir.path(), "typo.cfg", "[model]\ndim = 3\nalpah = 0.7\n");
    let o = radial_ns(&["check", &typo], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn run_writes_csv_snapshots_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), "run.cfg", &bump(&out, SPATIAL, "regime = cauchy-3d"));
    let o = radial_ns(&["run", &cfg], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let (header, rows) = read_csv(&std::fs::read_to_string(out.join("diagnostics.csv")).unwrap()).unwrap();
    assert_eq!(&header[..3], &["t", "dt", "min_rho"]);
    assert_eq!(&header[10..], &["k_moment_2", "k_moment_4", "boundary_contamination"]);
    let times: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    assert_eq!(times, vec![0.0, 0.005, 0.01, 0.015, 0.02]);
    assert!(rows.iter().all(|r| r[2] > 0.0));

    let mut snaps: Vec<_> = std::fs::read_dir(out.join("snapshots")).unwrap().map(|e| e.unwrap().path()).collect();
    snaps.sort();
    assert_eq!(snaps.len(), 3);
    let last = read_snapshot(&std::fs::read_to_string(&snaps[2]).unwrap()).unwrap();
    assert_eq!(last.header_value("time"), Some("0.02"));
    assert_eq!(last.rho.len(), 64);

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["status"], "completed");
    assert_eq!(manifest["admissibility"]["admissible"], true);
    assert_eq!(manifest["files"].as_array().unwrap().len(), 4);
    assert!(stdout(&o).contains(manifest["content_hash"].as_str().unwrap()));
}

#[test]
fn output_dir_follows_environment() {
    let dir = tempfile::tempdir().unwrap();
    let configured = dir.path().join("configured");
    let redirected = dir.path().join("redirected");
    let cfg = write_config(dir.path(), "run.cfg", &bump(&configured, SPATIAL, "regime = cauchy-3d"));
    assert!(radial_ns(&["run", &cfg], Some(&redirected)).status.success());
    assert!(redirected.join("manifest.json").exists());
    assert!(!configured.exists());
}

#[test]
fn enforced_inadmissible_run_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(
        dir.path(),
        "bad.cfg",
        &bump(&out, "dim = 3\nalpha = 0.67\ngamma = 1.1", "regime = cauchy-3d\npolicy = enforce"),
    );
    let o = radial_ns(&["run", &cfg], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn mms_constant_case_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("conv.csv");
    let o = radial_ns(
        &["mms", "--case", "constant", "--sizes", "16,32,64", "--output", &csv.to_string_lossy()],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("n_cells,dr,steps,error_rho,error_u"));
    assert!(text.contains("# status = exact"));
    assert_eq!(radial_ns(&["mms", "--sizes", "16,32"], None).status.code(), Some(2));
}
