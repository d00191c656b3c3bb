//! `fock`: van Hove energies on truncated Fock spaces and the commutation
//! relation on the interior grading.

use std::path::PathBuf;

use krein_core::c64;
use krein_core::models::{fock_build, van_hove_model};

use crate::config::ExperimentConfig;
use crate::error::{LabError, LabResult};
use crate::io::{fmt_num, write_csv};
use crate::report::{Check, Worst};

pub const DEFAULT_FREQS: [f64; 2] = [1.0, 3.0];
pub const DEFAULT_COUPLINGS: [f64; 2] = [1.0, 1.0];
pub const DEFAULT_MAX_TOTAL: usize = 12;
pub const ENERGY_TOL: f64 = 1e-6;

pub fn run_fock(cfg: &ExperimentConfig) -> LabResult<(Vec<Check>, Vec<PathBuf>, Vec<String>)> {
    let freqs = cfg.param_f64_list("freqs", &DEFAULT_FREQS)?;
    let v: Vec<c64> = cfg.param_f64_list("v", &DEFAULT_COUPLINGS)?.into_iter().map(|x| c64::new(x, 0.0)).collect();
    let max_total = cfg.param_usize("max_total", DEFAULT_MAX_TOTAL)?;
    if freqs.len() != v.len() {
        return Err(LabError::Config("model_params.freqs and model_params.v differ in length".into()));
    }
    if !(1..=40).contains(&max_total) {
        return Err(LabError::Config("model_params.max_total must lie in [1, 40]".into()));
    }
    let space = |m: usize| fock_build(&freqs, m as u32).map_err(|e| LabError::Config(e.to_string()));
    let mut rows = Vec::new();
    let mut energies = Vec::new();
    let mut exact = 0.0;
    let steps: Vec<usize> = (1..=max_total).filter(|m| (max_total - m) % 2 == 0).collect();
    for &m in &steps {
        let vh = van_hove_model(&space(m)?, &v, 0.5)?;
        let e = vh.truncated_ground_energy()?;
        exact = vh.exact_energy;
        energies.push(e);
        rows.push(vec![m.to_string(), fmt_num(e), fmt_num(exact), fmt_num(e - exact)]);
    }
    std::fs::create_dir_all(&cfg.out_dir).map_err(crate::error::io_err(&cfg.out_dir))?;
    let table = cfg.out_dir.join("van_hove.csv");
    write_csv(&table, &["M", "truncated_energy", "exact_energy", "gap"], &rows)?;

    let mut checks = Vec::new();
    let last = *energies.last().expect("at least one truncation");
    checks.push(Check::new("van_hove_energy", (last - exact).abs(), ENERGY_TOL));
    let mut mono = Worst::default();
    for w in energies.windows(2) {
        mono.add((w[1] - w[0]).max(0.0));
    }
    for &e in &energies {
        mono.add((exact - e).max(0.0));
    }
    checks.push(Check::new("variational_monotone", mono.0, 1e-12));

    let f = space(max_total)?;
    let w: Vec<c64> = (0..freqs.len()).map(|j| c64::new(0.5 / (j + 1) as f64, 0.25)).collect();
    checks.push(Check::new("ccr_interior", f.ccr_defect(&v, &w)?, cfg.tol));
    let prod = f.annihilation(&v)? * f.creation(&w)?;
    let ip: c64 = v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
    checks.push(Check::new("vacuum_matrix_element", (prod[(0, 0)] - ip).norm(), cfg.tol));
    let notes = vec![format!("Fock dimension {} at M = {max_total}", f.dim())];
    Ok((checks, vec![table], notes))
}
