//! Experiment runner for `krein-core`: seeded model generation, matrix and
//! family file formats, the identity suite, and the `verify`, `sweep`,
//! `nelson` and `fock` experiments behind the `krein-lab` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod gen;
pub mod io;
pub mod report;
pub mod suite;

use std::time::Instant;

pub use config::{Command, ExperimentConfig};
pub use error::{LabError, LabResult};
pub use report::{Check, ExperimentReport, Status};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "KREIN_LAB_THREADS";

/// Sizes the global thread pool from [`THREADS_ENV`]; later calls are no-ops.
pub fn configure_threads() -> LabResult<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| LabError::Config(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Runs the configured experiment and writes `report.json` into `out_dir`.
pub fn run(cfg: &ExperimentConfig) -> LabResult<ExperimentReport> {
    cfg.validate()?;
    let start = Instant::now();
    std::fs::create_dir_all(&cfg.out_dir).map_err(error::io_err(&cfg.out_dir))?;
    let (checks, mut artifacts, notes) = match cfg.command {
        Command::Verify => {
            let (c, n) = commands::run_verify(cfg)?;
            (c, Vec::new(), n)
        }
        Command::Sweep => {
            let out = commands::run_sweep(cfg)?;
            (out.checks, out.artifacts, out.notes)
        }
        Command::Nelson => commands::run_nelson(cfg)?,
        Command::Fock => commands::run_fock(cfg)?,
    };
    let path = cfg.out_dir.join("report.json");
    artifacts.push(path.clone());
    let report = ExperimentReport {
        config_echo: cfg.clone(),
        checks,
        artifacts,
        wall_time_ms: start.elapsed().as_millis() as u64,
        notes,
    };
    report.write(&path)?;
    Ok(report)
}
