//! `sweep`: norm-resolvent distances along a cutoff family.

use std::path::PathBuf;

use krein_core::convergence::{fit_rate, sweep, target_gap, uniform_smallness_check, ConvergenceCurve, PATH_TOL};
use krein_core::models::{fock_build, fock_cutoff_family, friedrichs_family, CutoffFamily, FriedrichsParams};
use krein_core::{c64, FreeHamiltonian};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::config::ExperimentConfig;
use crate::error::{LabError, LabResult};
use crate::io::{fmt_num, write_csv, write_family, write_json};
use crate::report::{Check, FAILED_RESIDUAL};

pub const FINAL_DISTANCE_BOUND: f64 = 1e-3;
pub const MONOTONE_SLACK: f64 = 1e-12;
pub const SMALLNESS_MARGIN: f64 = 0.1;
pub const SELF_ENERGY_GROWTH: f64 = 10.0;
/// Largest dimension for which `export_family` writes dense matrices.
pub const EXPORT_DIM_MAX: usize = 512;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitJson {
    pub rate: f64,
    pub constant: f64,
    pub residual: f64,
    pub levels_used: usize,
}

pub struct SweepOutput {
    pub checks: Vec<Check>,
    pub artifacts: Vec<PathBuf>,
    pub notes: Vec<String>,
    pub curves: Vec<ConvergenceCurve>,
}

fn extra_probes(cfg: &ExperimentConfig) -> LabResult<Vec<c64>> {
    let bad = || LabError::Config("model_params.probes must be a list of [re, im] pairs".into());
    match cfg.model_params.get("probes") {
        None => Ok(Vec::new()),
        Some(Value::Array(xs)) => xs
            .iter()
            .map(|p| match p.as_array().map(|v| v.as_slice()) {
                Some([re, im]) => Ok(c64::new(re.as_f64().ok_or_else(bad)?, im.as_f64().ok_or_else(bad)?)),
                _ => Err(bad()),
            })
            .collect(),
        Some(_) => Err(bad()),
    }
}

pub fn run_sweep(cfg: &ExperimentConfig) -> LabResult<SweepOutput> {
    let family = cfg.param_str("family", "friedrichs")?.to_string();
    match family.as_str() {
        "friedrichs" => {
            let d = FriedrichsParams::default();
            let p = FriedrichsParams {
                dim_max: cfg.param_usize("dim_max", *cfg.levels.last().unwrap_or(&d.dim_max))?,
                s: cfg.param_f64("s", d.s)?,
                eps: cfg.param_f64("eps", d.eps)?,
                coupling: cfg.param_f64("coupling", d.coupling)?,
            };
            let fam = friedrichs_family(&p, &cfg.levels, None).map_err(|e| LabError::Config(e.to_string()))?;
            let lc = fam.lambda_circ();
            let first = -p.self_energy(cfg.levels[0], lc);
            let last = -p.self_energy(*cfg.levels.last().unwrap(), lc);
            let growth = if cfg.levels.len() > 1 {
                vec![Check::below("self_energy_growth", SELF_ENERGY_GROWTH * first, last)]
            } else {
                Vec::new()
            };
            sweep_family(cfg, &family, &fam, growth, true)
        }
        "fock" => {
            let modes = cfg.param_usize("modes", *cfg.levels.last().unwrap_or(&1))?;
            let max_total = cfg.param_usize("max_total", 2)?;
            let eps = cfg.param_f64("eps", 0.05)?;
            let freqs: Vec<f64> = (1..=modes).map(|j| j as f64).collect();
            let space = fock_build(&freqs, max_total as u32).map_err(|e| LabError::Config(e.to_string()))?;
            let profile = |j: usize| c64::new(((j + 1) as f64).powf(-0.25 - eps), 0.0);
            let fam = fock_cutoff_family(&space, &profile, &cfg.levels, None, 0.5, None)
                .map_err(|e| LabError::Config(e.to_string()))?;
            sweep_family(cfg, &family, &fam, Vec::new(), true)
        }
        "constant" => {
            let dim = cfg.param_usize("dim", 8)?;
            let sm = crate::gen::singular_model(cfg.seed, dim).map_err(|e| LabError::Config(e.to_string()))?;
            let fam = CutoffFamily::constant(&sm, &cfg.levels)?;
            sweep_family(cfg, &family, &fam, Vec::new(), false)
        }
        other => Err(LabError::UnknownFamily(other.into())),
    }
}

fn sweep_family<F: FreeHamiltonian + Sync>(
    cfg: &ExperimentConfig,
    name: &str,
    fam: &CutoffFamily<F>,
    mut checks: Vec<Check>,
    converging: bool,
) -> LabResult<SweepOutput>
where
    F::Op: Send + Sync,
{
    let limit = fam.limit_model()?;
    let mut probes = vec![c64::new(0.0, fam.gamma_star()?)];
    probes.extend(extra_probes(cfg)?);
    let curves = probes
        .par_iter()
        .map(|&z| sweep(fam, &limit, z))
        .collect::<Result<Vec<_>, _>>()?;
    let mut notes = Vec::new();

    std::fs::create_dir_all(&cfg.out_dir).map_err(crate::error::io_err(&cfg.out_dir))?;
    let mut rows = Vec::new();
    for c in &curves {
        for (k, &n) in c.levels.iter().enumerate() {
            rows.push(vec![
                n.to_string(),
                fmt_num(c.z_probe.re),
                fmt_num(c.z_probe.im),
                fmt_num(c.distances[k]),
                fmt_num(c.path_mismatch[k]),
            ]);
        }
    }
    let curve_path = cfg.out_dir.join("curve.csv");
    write_csv(&curve_path, &["level", "z_re", "z_im", "distance", "path_mismatch"], &rows)?;
    let mut artifacts = vec![curve_path];

    let main = &curves[0];
    let fit_path = cfg.out_dir.join("fit.json");
    match fit_rate(&main.levels, &main.distances) {
        Ok(f) => {
            write_json(&fit_path, &FitJson { rate: f.rate, constant: f.constant, residual: f.residual, levels_used: f.levels_used })?;
            artifacts.push(fit_path);
            if converging {
                checks.push(Check::below("rate_positive", -f.rate, 0.0));
            }
        }
        Err(e) => {
            write_json(&fit_path, &serde_json::json!({ "error": e.to_string() }))?;
            artifacts.push(fit_path);
            notes.push(format!("rate fit skipped: {e}"));
        }
    }

    let mismatch = curves.iter().flat_map(|c| c.path_mismatch.iter().copied()).fold(0.0, f64::max);
    checks.push(Check::new("path_agreement", mismatch, PATH_TOL.max(cfg.tol)));
    if converging {
        let rise = main.distances.windows(2).map(|w| (w[1] - w[0]).max(0.0)).fold(0.0, f64::max);
        checks.push(Check::new("distance_monotone", rise, MONOTONE_SLACK));
        if main.levels.len() > 1 {
            let last = main.final_distance().unwrap_or(FAILED_RESIDUAL);
            checks.push(Check::below("final_distance", last, FINAL_DISTANCE_BOUND));
        }
        let rep = uniform_smallness_check(fam, SMALLNESS_MARGIN)?;
        checks.push(Check::below("uniform_smallness", rep.sup, 1.0 - SMALLNESS_MARGIN));
        let i = fam.levels().len() - 1;
        if fam.level_indices()[i] == *cfg.levels.last().unwrap() {
            checks.push(Check::new("target_gap_last_level", target_gap(fam, &limit, i)?, cfg.tol.max(1e-12)));
        }
    } else {
        let worst = curves.iter().flat_map(|c| c.distances.iter().copied()).fold(0.0, f64::max);
        checks.push(Check::new("constant_family_distance", worst, cfg.tol.max(1e-10)));
    }

    if cfg.param_bool("export_family", false)? {
        if fam.model().dim() > EXPORT_DIM_MAX {
            return Err(LabError::Config(format!("export_family needs dimension ≤ {EXPORT_DIM_MAX}")));
        }
        artifacts.extend(write_family(&cfg.out_dir.join("family"), name, fam)?);
    }
    notes.push(format!("family {name}, dimension {}, λ∘ = {}", fam.model().dim(), fam.lambda_circ()));
    Ok(SweepOutput { checks, artifacts, notes, curves })
}
