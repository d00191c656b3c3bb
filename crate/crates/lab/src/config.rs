//! Experiment configuration. Values come from command-line flags, then the
//! JSON config file, then per-command defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{LabError, LabResult};
use crate::io::read_json;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Verify,
    Sweep,
    Nelson,
    Fock,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Sweep => "sweep",
            Command::Nelson => "nelson",
            Command::Fock => "fock",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub seed: u64,
    pub dims: Vec<usize>,
    pub tol: f64,
    pub levels: Vec<usize>,
    pub model_params: BTreeMap<String, Value>,
    pub out_dir: PathBuf,
}

/// Every field optional; absent fields fall through to the defaults.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub command: Option<Command>,
    pub seed: Option<u64>,
    pub dims: Option<Vec<usize>>,
    pub tol: Option<f64>,
    pub levels: Option<Vec<usize>>,
    pub model_params: Option<BTreeMap<String, Value>>,
    pub out_dir: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> LabResult<Self> {
        read_json(path).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub out_dir: Option<PathBuf>,
}

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TOL: f64 = 1e-10;

impl ExperimentConfig {
    pub fn defaults(command: Command) -> Self {
        let levels = match command {
            Command::Sweep => vec![16, 64, 256, 1024, 4096],
            _ => Vec::new(),
        };
        Self {
            command,
            seed: DEFAULT_SEED,
            dims: vec![8],
            tol: DEFAULT_TOL,
            levels,
            model_params: BTreeMap::new(),
            out_dir: PathBuf::from(format!("krein-lab-{}", command.name())),
        }
    }

    /// `command` comes from the subcommand and wins over the file's.
    pub fn resolve(command: Command, file: Option<ConfigFile>, flags: Overrides) -> LabResult<Self> {
        let mut cfg = Self::defaults(command);
        if let Some(f) = file {
            if let Some(c) = f.command {
                if c != command {
                    return Err(LabError::Config(format!(
                        "config file is for `{}` but `{}` was requested",
                        c.name(),
                        command.name()
                    )));
                }
            }
            cfg.seed = f.seed.unwrap_or(cfg.seed);
            cfg.dims = f.dims.unwrap_or(cfg.dims);
            cfg.tol = f.tol.unwrap_or(cfg.tol);
            cfg.levels = f.levels.unwrap_or(cfg.levels);
            cfg.model_params = f.model_params.unwrap_or(cfg.model_params);
            cfg.out_dir = f.out_dir.unwrap_or(cfg.out_dir);
        }
        cfg.seed = flags.seed.unwrap_or(cfg.seed);
        cfg.tol = flags.tol.unwrap_or(cfg.tol);
        cfg.out_dir = flags.out_dir.unwrap_or(cfg.out_dir);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> LabResult<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(LabError::Config(format!("tol must be positive, got {}", self.tol)));
        }
        match self.command {
            Command::Verify => {
                if self.dims.is_empty() {
                    return Err(LabError::Config("dims must be nonempty for verify".into()));
                }
                if let Some(d) = self.dims.iter().find(|&&d| !(2..=512).contains(&d)) {
                    return Err(LabError::Config(format!("dimension {d} outside [2, 512]")));
                }
            }
            Command::Sweep => {
                if self.levels.is_empty() {
                    return Err(LabError::Config("levels must be nonempty for sweep".into()));
                }
                if self.levels.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(LabError::Config("levels must be strictly ascending".into()));
                }
            }
            Command::Nelson | Command::Fock => {}
        }
        Ok(())
    }

    fn param(&self, key: &str) -> Option<&Value> {
        self.model_params.get(key)
    }

    pub fn param_f64(&self, key: &str, default: f64) -> LabResult<f64> {
        match self.param(key) {
            None => Ok(default),
            Some(v) => v.as_f64().ok_or_else(|| bad_param(key, "a number")),
        }
    }

    pub fn param_usize(&self, key: &str, default: usize) -> LabResult<usize> {
        match self.param(key) {
            None => Ok(default),
            Some(v) => v.as_u64().map(|x| x as usize).ok_or_else(|| bad_param(key, "a nonnegative integer")),
        }
    }

    pub fn param_bool(&self, key: &str, default: bool) -> LabResult<bool> {
        match self.param(key) {
            None => Ok(default),
            Some(v) => v.as_bool().ok_or_else(|| bad_param(key, "a boolean")),
        }
    }

    pub fn param_str<'a>(&'a self, key: &str, default: &'a str) -> LabResult<&'a str> {
        match self.param(key) {
            None => Ok(default),
            Some(v) => v.as_str().ok_or_else(|| bad_param(key, "a string")),
        }
    }

    pub fn param_f64_list(&self, key: &str, default: &[f64]) -> LabResult<Vec<f64>> {
        match self.param(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(xs)) => {
                xs.iter().map(|x| x.as_f64().ok_or_else(|| bad_param(key, "a list of numbers"))).collect()
            }
            Some(_) => Err(bad_param(key, "a list of numbers")),
        }
    }
}

fn bad_param(key: &str, want: &str) -> LabError {
    LabError::Config(format!("model_params.{key} must be {want}"))
}
