//! `verify`: the identity suite over seeded random models.

use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::{LabError, LabResult};
use crate::gen::sub_seed;
use crate::report::{Check, Worst};
use crate::suite::{model_suite, Kind, SUITE_NAMES};

pub const DEFAULT_MODELS_PER_DIM: usize = 3;

pub fn run_verify(cfg: &ExperimentConfig) -> LabResult<(Vec<Check>, Vec<String>)> {
    if cfg.dims.is_empty() {
        return Err(LabError::Config("dims must be nonempty for verify".into()));
    }
    let per_dim = cfg.param_usize("models_per_dim", DEFAULT_MODELS_PER_DIM)?;
    if per_dim == 0 {
        return Err(LabError::Config("model_params.models_per_dim must be at least 1".into()));
    }
    let jobs: Vec<(u64, usize)> = cfg
        .dims
        .iter()
        .enumerate()
        .flat_map(|(k, &n)| (0..per_dim).map(move |i| (sub_seed(cfg.seed, (k * per_dim + i) as u64), n)))
        .collect();
    let results: Vec<_> = jobs.par_iter().map(|&(seed, n)| model_suite(seed, n)).collect();
    let checks = SUITE_NAMES
        .iter()
        .enumerate()
        .map(|(i, &name)| {
            let mut w = Worst::default();
            for r in &results {
                w.add(r[i].value);
            }
            match results[0][i].kind {
                Kind::Identity => Check::new(name, w.0, cfg.tol),
                Kind::Contraction => Check::below(name, w.0, 1.0),
            }
        })
        .collect();
    let notes = vec![format!("{} models: dims {:?}, {} per dimension", jobs.len(), cfg.dims, per_dim)];
    Ok((checks, notes))
}
