//! `nelson`: the counterterm table `ℰ_Λ` and its logarithmic fit.

use std::path::PathBuf;

use krein_core::convergence::log_growth_fit;
use krein_core::models::{nelson_counterterm, NelsonParams};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{LabError, LabResult};
use crate::io::{fmt_num, write_csv, write_json};
use crate::report::Check;

pub const DEFAULT_LAMBDAS: [f64; 4] = [1e3, 1e4, 1e5, 1e6];
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;
pub const SLOPE_TOL: f64 = 0.05;
pub const RESIDUAL_FRACTION: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogFitJson {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub asymptotic_slope: f64,
}

pub fn nelson_params(cfg: &ExperimentConfig) -> LabResult<NelsonParams> {
    let mu = cfg.param_f64("mu", 1.0)?;
    let m = cfg.param_f64("m", 1.0)?;
    let g = cfg.param_f64("g", 1.0)?;
    let n = cfg.param_usize("n_particles", 1)?;
    NelsonParams::new(mu, m, g, n as u32).map_err(|e| LabError::Config(e.to_string()))
}

pub fn run_nelson(cfg: &ExperimentConfig) -> LabResult<(Vec<Check>, Vec<PathBuf>, Vec<String>)> {
    let p = nelson_params(cfg)?;
    let lambdas = cfg.param_f64_list("lambdas", &DEFAULT_LAMBDAS)?;
    if lambdas.is_empty() || lambdas.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
        return Err(LabError::Config("model_params.lambdas must be positive and nonempty".into()));
    }
    if lambdas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LabError::Config("model_params.lambdas must be strictly ascending".into()));
    }
    let quad_tol = cfg.param_f64("quad_tol", DEFAULT_QUAD_TOL)?;
    if quad_tol.is_nan() || quad_tol <= 0.0 {
        return Err(LabError::Config("model_params.quad_tol must be positive".into()));
    }
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    let mut pairs = Vec::new();
    let mut rows = Vec::new();
    let mut quad_ok = true;
    for &lam in &lambdas {
        match nelson_counterterm(&p, lam, quad_tol) {
            Ok(e) => {
                pairs.push((lam, e));
                rows.push(vec![fmt_num(lam), fmt_num(e), fmt_num(e / lam.ln())]);
            }
            Err(err) => {
                quad_ok = false;
                notes.push(format!("Λ = {lam}: {err}"));
            }
        }
    }
    checks.push(if quad_ok { Check::new("quadrature", 0.0, quad_tol) } else { Check::failed("quadrature", quad_tol) });
    std::fs::create_dir_all(&cfg.out_dir).map_err(crate::error::io_err(&cfg.out_dir))?;
    let table = cfg.out_dir.join("nelson.csv");
    write_csv(&table, &["Lambda", "E_Lambda", "E_Lambda_over_logLambda"], &rows)?;
    let mut artifacts = vec![table];
    match log_growth_fit(&pairs) {
        Ok(fit) => {
            let expected = p.asymptotic_slope();
            let fit_path = cfg.out_dir.join("log_fit.json");
            let json = LogFitJson { slope: fit.slope, intercept: fit.intercept, residual: fit.residual, asymptotic_slope: expected };
            write_json(&fit_path, &json)?;
            artifacts.push(fit_path);
            checks.push(Check::new("log_slope", (fit.slope / expected - 1.0).abs(), SLOPE_TOL));
            let top = pairs.last().map(|p| p.1).unwrap_or(0.0);
            checks.push(Check::new("log_fit_residual", fit.residual / top, RESIDUAL_FRACTION));
        }
        Err(err) => notes.push(format!("log fit skipped: {err}")),
    }
    let mono = pairs.windows(2).map(|w| (w[0].1 - w[1].1).max(0.0)).fold(0.0, f64::max);
    checks.push(Check::new("monotone_in_cutoff", mono, 0.0));
    Ok((checks, artifacts, notes))
}
