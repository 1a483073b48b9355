use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_wg-schwarz");

fn run(args: &[&str], env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("WG_SCHWARZ_OUTPUT_DIR");
    if let Some(dir) = env_out {
        cmd.env("WG_SCHWARZ_OUTPUT_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn list_experiments_names_all_seven() {
    let o = run(&["list-experiments"], None);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for name in ["spectrum", "limit-curve", "factor-vs-N", "mode-sweep", "k-robust", "nilpotency", "discrete-scan"] {
        assert!(text.contains(name), "{name} missing from\n{text}");
    }
}

#[test]
fn validate_reports_bad_configs_with_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let negative = write_config(tmp.path(), "neg.cfg", "experiment = spectrum\nk = 30\nsigma = -1\ndelta = 0.1\nL = 1\nN = 20\n");
    let o = run(&["validate", negative.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("sigma must be ≥ 0"), "{}", stderr(&o));

    let missing = write_config(tmp.path(), "missing.cfg", "experiment = spectrum\nk = 30\nsigma = 0.1\ndelta = 0.1\nL = 1\n");
    let o = run(&["validate", missing.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains('N'), "{}", stderr(&o));

    let unknown = write_config(tmp.path(), "unknown.cfg", "experiment = limit-curve\nk = 30\nsigma = 0.1\ndelta = 0.1\nL = 1\nfoo = 3\n");
    let o = run(&["validate", unknown.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("foo"), "{}", stderr(&o));

    let zero_sigma = write_config(tmp.path(), "zero.cfg", "experiment = limit-curve\nk = 30\nsigma = 0\ndelta = 0.1\nL = 1\n");
    let o = run(&["validate", zero_sigma.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));

    let good = write_config(tmp.path(), "good.cfg", "# figure setup\nexperiment = spectrum\nk = 30\nsigma = 0.1\ndelta = 0.1\nL = 1\nN = 160\n");
    let o = run(&["validate", good.to_str().unwrap()], None);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn spectrum_run_writes_files_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("spec");
    let cfg = write_config(
        tmp.path(),
        "spectrum.cfg",
        &format!("experiment = spectrum\nk = 30\nsigma = 0.1\ndelta = 0.1\nL = 1\nN = 40\noutput_dir = {}\n", out.display()),
    );
    let o = run(&["run", cfg.to_str().unwrap()], None);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["eigenvalues.csv", "curve.csv", "spectrum.svg", "manifest.json"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    let eig = fs::read_to_string(out.join("eigenvalues.csv")).unwrap();
    let mut lines = eig.lines();
    assert!(lines.next().unwrap().starts_with("re,im,distance_to_limit"));
    assert_eq!(lines.count(), 2 * 39);
    let svg = fs::read_to_string(out.join("spectrum.svg")).unwrap();
    assert!(svg.contains("<polyline") && svg.contains("<circle"));
    let m = manifest(&out);
    assert_eq!(m["status"], "ok");
    assert_eq!(m["experiment"], "spectrum");
    assert_eq!(m["parameters"]["N"], "40");
    assert!(m["tolerances"].as_object().is_some_and(|t| !t.is_empty()));
    assert!(m["version"].is_string());
    assert_eq!(m["tolerances"]["limit_distance"], 5e-2);
}

#[test]
fn environment_overrides_output_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let env_dir = tmp.path().join("from_env");
    let cfg = write_config(
        tmp.path(),
        "curve.cfg",
        &format!("experiment = limit-curve\nk = 30\nsigma = 5\ndelta = 0.1\nL = 1\noutput_dir = {}\n", tmp.path().join("ignored").display()),
    );
    let o = run(&["run", cfg.to_str().unwrap()], Some(&env_dir));
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(env_dir.join("curve.csv").exists());
    assert!(!tmp.path().join("ignored").exists());
}

#[test]
fn factor_vs_n_is_increasing_below_the_bound_and_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let body = |dir: &Path| {
        format!(
            "experiment = factor-vs-N\nk = 30\nsigma = 5\ndelta = 0.1\nL = 1\nN_list = 10, 20, 40, 80\nseed = 11\noutput_dir = {}\n",
            dir.display()
        )
    };
    let (d1, d2) = (tmp.path().join("one"), tmp.path().join("two"));
    for (name, d) in [("a.cfg", &d1), ("b.cfg", &d2)] {
        let cfg = write_config(tmp.path(), name, &body(d));
        let o = run(&["run", cfg.to_str().unwrap()], None);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let text = fs::read_to_string(d1.join("rho_vs_N.csv")).unwrap();
    assert_eq!(text, fs::read_to_string(d2.join("rho_vs_N.csv")).unwrap());

    let mut rho = Vec::new();
    let mut bound = None;
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let v: f64 = cols[1].parse().unwrap();
        if cols[0] == "limit" {
            bound = Some(v);
        } else {
            rho.push(v);
        }
    }
    let bound = bound.expect("limit row");
    assert_eq!(rho.len(), 4);
    assert!(rho.windows(2).all(|w| w[1] >= w[0]), "{rho:?}");
    assert!(rho.iter().all(|&r| r < bound));
    assert_eq!(manifest(&d1)["seeds"]["initial_interface_data"], 11);
}

#[test]
fn nilpotency_records_the_norm() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("nil");
    let cfg = write_config(
        tmp.path(),
        "nil.cfg",
        &format!("experiment = nilpotency\nk = 30\nsigma = 0\ndelta = 0.1\nL = 1\nN = 8\noutput_dir = {}\n", out.display()),
    );
    let o = run(&["run", cfg.to_str().unwrap()], None);
    assert!(o.status.success(), "{}", stderr(&o));
    let m = manifest(&out);
    let rel = m["summary"]["max_relative"].as_f64().expect("norm in summary");
    assert!(rel <= 1e-8);
}

#[test]
fn mode_sweep_and_discrete_scan_emit_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let modes = tmp.path().join("modes");
    let cfg = write_config(
        tmp.path(),
        "modes.cfg",
        &format!("experiment = mode-sweep\nk = 30\nsigma = 1\ndelta = 0.1\nL = 1\nL_hat = 1\nequation = helmholtz\noutput_dir = {}\n", modes.display()),
    );
    let o = run(&["run", cfg.to_str().unwrap()], None);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(fs::read_to_string(modes.join("modes.csv")).unwrap().lines().count() > 10);

    let scan = tmp.path().join("scan");
    let cfg = write_config(
        tmp.path(),
        "scan.cfg",
        &format!("experiment = discrete-scan\nk_list = 5\nsigma = 1\nN_list = 2, 3\ncase = waveguide\noutput_dir = {}\n", scan.display()),
    );
    let o = run(&["run", cfg.to_str().unwrap()], None);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(scan.join("counts.csv")).unwrap();
    assert!(csv.starts_with("case,k,N,iterations,converged\n"));
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn failed_experiment_exits_two_and_records_the_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("starved");
    let cfg = write_config(
        tmp.path(),
        "starved.cfg",
        &format!(
            "experiment = spectrum\nk = 30\nsigma = 0.1\ndelta = 0.1\nL = 1\nN = 40\nroot_max_iter = 1\noutput_dir = {}\n",
            out.display()
        ),
    );
    let o = run(&["run", cfg.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let m = manifest(&out);
    assert_eq!(m["status"], "failed");
    assert!(m["error"].is_string());
}
