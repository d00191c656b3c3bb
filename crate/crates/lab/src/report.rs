//! `report.json`: the resolved configuration, named checks and emitted files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::LabResult;
use crate::io::write_json;

/// Residual recorded for a check whose computation itself failed.
pub const FAILED_RESIDUAL: f64 = f64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub worst_residual: f64,
    pub tolerance: f64,
}

impl Check {
    /// PASS iff `worst_residual ≤ tolerance`; a NaN residual fails.
    pub fn new(name: impl Into<String>, worst_residual: f64, tolerance: f64) -> Self {
        let worst_residual = if worst_residual.is_nan() { FAILED_RESIDUAL } else { worst_residual };
        let status = if worst_residual <= tolerance { Status::Pass } else { Status::Fail };
        Self { name: name.into(), status, worst_residual, tolerance }
    }

    /// `value < bound`, recorded as the residual `max(value − bound, 0)`
    /// against tolerance 0, or [`FAILED_RESIDUAL`] if the bound is attained.
    pub fn below(name: impl Into<String>, value: f64, bound: f64) -> Self {
        let r = if value < bound { 0.0 } else { (value - bound).max(f64::MIN_POSITIVE) };
        Self::new(name, r, 0.0)
    }

    pub fn failed(name: impl Into<String>, tolerance: f64) -> Self {
        Self::new(name, FAILED_RESIDUAL, tolerance)
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Running maximum of residuals that turns any error into a failure.
#[derive(Debug, Clone, Copy, Default)]
pub struct Worst(pub f64);

impl Worst {
    pub fn add(&mut self, r: f64) {
        self.0 = if r.is_nan() { FAILED_RESIDUAL } else { self.0.max(r) };
    }

    pub fn add_result<E>(&mut self, r: Result<f64, E>) {
        self.add(r.unwrap_or(FAILED_RESIDUAL));
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config_echo: ExperimentConfig,
    pub checks: Vec<Check>,
    pub artifacts: Vec<PathBuf>,
    pub wall_time_ms: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ExperimentReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else {
            1
        }
    }

    pub fn write(&self, path: &Path) -> LabResult<()> {
        write_json(path, self)
    }

    pub fn summary_lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                let tag = if c.passed() { "PASS" } else { "FAIL" };
                format!("{tag} {:<36} worst {:.3e}  tol {:.1e}", c.name, c.worst_residual, c.tolerance)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_rules() {
        assert!(Check::new("a", 1e-12, 1e-10).passed());
        assert!(!Check::new("a", 1e-9, 1e-10).passed());
        let nan = Check::new("a", f64::NAN, 1.0);
        assert!(!nan.passed() && nan.worst_residual > nan.tolerance);
        assert!(Check::below("b", 0.5, 1.0).passed());
        let at = Check::below("b", 1.0, 1.0);
        assert!(!at.passed() && at.worst_residual > at.tolerance);
    }

    #[test]
    fn statuses_serialize_in_upper_case() {
        let c = Check::new("x", 0.0, 1.0);
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("\"status\":\"PASS\""));
    }

    #[test]
    fn worst_tracks_errors() {
        let mut w = Worst::default();
        w.add(1e-3);
        w.add_result::<()>(Ok(1e-5));
        assert_eq!(w.0, 1e-3);
        w.add_result::<()>(Err(()));
        assert_eq!(w.0, FAILED_RESIDUAL);
    }
}
