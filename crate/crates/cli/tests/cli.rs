//! End-to-end runs of the `quarkonium` binary.

use std::path::Path;
use std::process::{Command, Output};

use quarkonium_cli::sidecar::{read_sidecar, sidecar_path};
use quarkonium_cli::Config;

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quarkonium"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn lines(path: &Path) -> usize {
    std::fs::read_to_string(path).unwrap().lines().count()
}

#[test]
fn help_and_version_succeed() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["--help"], dir.path())), 0);
    assert_eq!(code(&run(&["--version"], dir.path())), 0);
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["--bogus"], dir.path())), 1);
    assert_eq!(code(&run(&["launch"], dir.path())), 1);
    assert_eq!(code(&run(&["--preset", "tt", "critical-field"], dir.path())), 1);
    assert_eq!(
        code(&run(
            &["--z", "0.15", "--lambda", "0.4", "--omega", "1", "scan", "--mode", "sideways"],
            dir.path()
        )),
        1
    );
}

#[test]
fn physical_frequency_without_mass_scale_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &[
            "--z",
            "0.15",
            "--lambda",
            "0.4",
            "--omega",
            "1",
            "--omega-unit",
            "hz",
            "scan",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("omega_unit"));
}

#[test]
fn conflicting_inputs_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "[system]\nalpha_s = 0.112\nz = 0.15\nlambda = 0.4\n").unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "--omega", "1", "scan"], dir.path());
    assert_eq!(code(&o), 1);
    std::fs::write(&cfg, "[system]\nz = 0.15\nlambda = 0.4\n[scan]\nmodes = []\n").unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "--omega", "1", "scan"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("usage"));
}

#[test]
fn numeric_failures_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &[
            "--z",
            "0.15",
            "--lambda",
            "0.4",
            "action-table",
            "--n-min",
            "1e-300",
            "--points",
            "2",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 2);
}

#[test]
fn scan_writes_one_row_per_point_and_mode() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.csv");
    let o = run(
        &[
            "--z",
            "0.15",
            "--lambda",
            "0.4",
            "--omega",
            "1",
            "--out",
            out.to_str().unwrap(),
            "scan",
            "--points",
            "12",
            "--mode",
            "hydrogen,small_a,large_a",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(lines(&out), 12 * 3 + 1);
    let meta = read_sidecar(&sidecar_path(&out)).unwrap();
    assert_eq!(meta.command, "scan");
    assert_eq!(meta.details["rows"], 36);
}

#[test]
fn sidecar_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    let o = run(
        &[
            "--preset",
            "cc",
            "--seed",
            "11",
            "--out",
            first.to_str().unwrap(),
            "critical-field",
            "--n",
            "5,10",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let meta = read_sidecar(&sidecar_path(&first)).unwrap();
    assert_eq!(meta.config.run.seed, 11);
    assert_eq!(meta.config.critical.n, vec![5.0, 10.0]);

    let toml = meta.config.to_toml_string().unwrap();
    assert_eq!(Config::from_toml_str(&toml).unwrap(), meta.config);
    let cfg = dir.path().join("replay.toml");
    std::fs::write(&cfg, toml).unwrap();
    let second = dir.path().join("second.csv");
    let o = run(
        &[
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            second.to_str().unwrap(),
            "critical-field",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
    assert_eq!(
        read_sidecar(&sidecar_path(&second)).unwrap().config_sha256,
        meta.config_sha256
    );
}

#[test]
fn json_output_by_extension() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("table.json");
    let o = run(
        &[
            "--z",
            "0.15",
            "--lambda",
            "0.4",
            "--out",
            out.to_str().unwrap(),
            "action-table",
            "--points",
            "5",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 5);
}

#[test]
fn table_comparison_lists_every_reading() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tables.csv");
    let o = run(
        &["--out", out.to_str().unwrap(), "critical-field", "--tables"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    // 5 presets × 3 readings × 2 formulas × 3 actions
    assert_eq!(lines(&out), 90 + 1);
}

#[test]
fn undriven_poincare_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sections.csv");
    let cfg = dir.path().join("p.toml");
    std::fs::write(&cfg, "[poincare]\ncircle_factors = [1.0]\nthetas_per_circle = 2\n").unwrap();
    let o = run(
        &[
            "--config",
            cfg.to_str().unwrap(),
            "--eps-ratio",
            "0",
            "--out",
            out.to_str().unwrap(),
            "poincare",
            "--ratio-form",
            "eps_over_eps_cr",
            "--periods",
            "10",
            "--mode",
            "a,c",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    // 2 panels × 2 trajectories × (initial point + 10 periods)
    assert_eq!(lines(&out), 2 * 2 * 11 + 1);
    let meta = read_sidecar(&sidecar_path(&out)).unwrap();
    assert_eq!(meta.details["panels"].as_array().unwrap().len(), 2);
}

#[test]
fn validate_passes_and_fault_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["validate"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("Z^(3/4)") && text.contains("chaos threshold"));
    let o = run(&["validate", "--inject-fault", "convention"], dir.path());
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL closed form vs quadrature"));
}
