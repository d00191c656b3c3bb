use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use krein_lab::config::{Command as Cmd, ConfigFile, ExperimentConfig, Overrides};
use krein_lab::{run, ExperimentReport, LabError};
use serde_json::json;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_krein-lab"))
}

fn config(dir: &Path, name: &str, value: serde_json::Value) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, value.to_string()).unwrap();
    p
}

fn exec(args: &[&str], cfg: Option<&Path>, out: &Path) -> Output {
    let mut c = bin();
    c.args(args).arg("--out").arg(out);
    if let Some(p) = cfg {
        c.arg("--config").arg(p);
    }
    c.output().unwrap()
}

fn report(out: &Path) -> ExperimentReport {
    serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

fn resolved(cmd: Cmd, file: serde_json::Value, out: &Path) -> Result<ExperimentConfig, LabError> {
    let f: ConfigFile = serde_json::from_value(file).unwrap();
    ExperimentConfig::resolve(cmd, Some(f), Overrides { out_dir: Some(out.into()), ..Default::default() })
}

#[test]
fn verify_default_run_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("v");
    let o = exec(&["verify", "--seed", "42"], None, &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let r = report(&out);
    assert!(r.checks.len() >= 12);
    assert!(r.all_passed());
    assert_eq!(r.config_echo.dims, vec![8]);
    assert!(String::from_utf8_lossy(&o.stdout).lines().any(|l| l.starts_with("PASS krein_oracle")));
}

#[test]
fn empty_dims_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "c.json", json!({"dims": []}));
    let o = exec(&["verify"], Some(&cfg), &tmp.path().join("v"));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("dims"));
}

#[test]
fn unreachable_tolerance_fails_with_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("v");
    let o = exec(&["verify", "--tol", "1e-30"], None, &out);
    assert_eq!(o.status.code(), Some(1));
    let r = report(&out);
    assert!(r.checks.iter().any(|c| !c.passed()));
    assert!(r.checks.iter().all(|c| c.worst_residual.is_finite()));
}

#[test]
fn unknown_family_and_mismatched_command() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "c.json", json!({"model_params": {"family": "nope"}}));
    assert_eq!(exec(&["sweep"], Some(&cfg), &tmp.path().join("s")).status.code(), Some(2));
    let cfg = config(tmp.path(), "d.json", json!({"command": "fock"}));
    assert_eq!(exec(&["nelson"], Some(&cfg), &tmp.path().join("n")).status.code(), Some(2));
}

#[test]
fn single_level_sweep_skips_the_fit() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("s");
    let cfg = resolved(Cmd::Sweep, json!({"levels": [4], "model_params": {"dim_max": 64}}), &out).unwrap();
    let r = run(&cfg).unwrap();
    assert!(r.notes.iter().any(|n| n.contains("rate fit skipped")));
    let fit = fs::read_to_string(out.join("fit.json")).unwrap();
    assert!(fit.contains("error"));
    let curve = fs::read_to_string(out.join("curve.csv")).unwrap();
    assert_eq!(curve.lines().count(), 2);
    assert!(curve.starts_with("level,z_re,z_im,distance,path_mismatch\n"));
}

#[test]
fn constant_family_has_zero_distances() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("s");
    let cfg = resolved(Cmd::Sweep, json!({"levels": [1, 2, 3, 4], "model_params": {"family": "constant", "dim": 6}}), &out)
        .unwrap();
    let r = run(&cfg).unwrap();
    assert!(r.all_passed(), "{:?}", r.checks);
    let mut rd = csv::Reader::from_path(out.join("curve.csv")).unwrap();
    for row in rd.records() {
        let d: f64 = row.unwrap()[3].parse().unwrap();
        assert!(d <= 1e-10, "{d}");
    }
}

#[test]
fn small_friedrichs_sweep_with_extra_probe_and_export() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("s");
    let params = json!({"dim_max": 128, "probes": [[1.0, 2.0]], "export_family": true});
    let cfg = resolved(Cmd::Sweep, json!({"levels": [4, 8, 16, 32, 128], "model_params": params}), &out).unwrap();
    let r = run(&cfg).unwrap();
    let names: Vec<&str> = r.checks.iter().map(|c| c.name.as_str()).collect();
    for want in ["path_agreement", "distance_monotone", "final_distance", "rate_positive", "uniform_smallness"] {
        assert!(names.contains(&want), "{want} missing from {names:?}");
    }
    let curve = fs::read_to_string(out.join("curve.csv")).unwrap();
    assert_eq!(curve.lines().count(), 1 + 2 * 5);
    assert!(out.join("family/manifest.json").exists());
    let (name, fam) = krein_lab::io::read_family(&out.join("family/manifest.json")).unwrap();
    assert_eq!((name.as_str(), fam.levels().len()), ("friedrichs", 5));
}

#[test]
fn fock_sweep_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("f");
    let cfg = resolved(Cmd::Sweep, json!({"levels": [1, 2, 3, 4], "model_params": {"family": "fock"}}), &out).unwrap();
    let r = run(&cfg).unwrap();
    let smallness = r.checks.iter().find(|c| c.name == "uniform_smallness").unwrap();
    assert!(smallness.passed());
}

#[test]
fn nelson_rejects_negative_mass() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "c.json", json!({"model_params": {"mu": -1.0}}));
    assert_eq!(exec(&["nelson"], Some(&cfg), &tmp.path().join("n")).status.code(), Some(2));
}

#[test]
fn nelson_single_cutoff_skips_the_fit() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("n");
    let cfg = resolved(Cmd::Nelson, json!({"model_params": {"lambdas": [0.001]}}), &out).unwrap();
    let r = run(&cfg).unwrap();
    assert!(r.notes.iter().any(|n| n.contains("log fit skipped")));
    assert!(!out.join("log_fit.json").exists());
    assert_eq!(fs::read_to_string(out.join("nelson.csv")).unwrap().lines().count(), 2);
}

#[test]
fn default_nelson_and_fock_pass() {
    let tmp = tempfile::tempdir().unwrap();
    for cmd in ["nelson", "fock"] {
        let out = tmp.path().join(cmd);
        let o = exec(&[cmd], None, &out);
        assert_eq!(o.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&o.stdout));
    }
    let table = fs::read_to_string(tmp.path().join("fock/van_hove.csv")).unwrap();
    assert!(table.starts_with("M,truncated_energy,exact_energy,gap\n"));
}

#[test]
fn tables_are_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfgs = [
        (Cmd::Sweep, json!({"levels": [4, 8, 16, 32], "model_params": {"dim_max": 64}}), "curve.csv"),
        (Cmd::Nelson, json!({}), "nelson.csv"),
        (Cmd::Fock, json!({}), "van_hove.csv"),
    ];
    for (cmd, file, table) in cfgs {
        let a = tmp.path().join(format!("{}-a", cmd.name()));
        let b = tmp.path().join(format!("{}-b", cmd.name()));
        run(&resolved(cmd, file.clone(), &a).unwrap()).unwrap();
        run(&resolved(cmd, file, &b).unwrap()).unwrap();
        assert_eq!(fs::read(a.join(table)).unwrap(), fs::read(b.join(table)).unwrap(), "{table}");
    }
}
