#![allow(dead_code)]

use faer::Mat;
use krein_core::singular::{CorrectionS, Perturbation, SingularModel};
use krein_core::{c64, CMat, FreeHamiltonian, OpAlgebra, OperatorModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> CMat {
    Mat::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        c64::new(scale * re, scale * im)
    })
}

pub fn hermitian(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> CMat {
    let x = gaussian(rng, n, scale);
    Mat::from_fn(n, n, |i, j| (x[(i, j)] + x[(j, i)].conj()) * 0.5)
}

pub fn free_model(rng: &mut ChaCha8Rng, n: usize) -> OperatorModel {
    OperatorModel::new(&hermitian(rng, n, 1.0)).unwrap()
}

/// A random `(H, A, S)` with `‖A‖_{𝔥_s,𝔉}^{s*}` comparable to `√(λ_inf²+1)`
/// and `S` of relative bound about 0.3.
pub fn singular_model(seed: u64, n: usize) -> SingularModel<OperatorModel> {
    let mut r = rng(seed);
    let model = free_model(&mut r, n);
    let s_exp = 0.5;
    let raw = Perturbation::new(&model, gaussian(&mut r, n, 1.0), s_exp).unwrap();
    let li = model.lambda_inf();
    let target = 1.5 * (li * li + 1.0).sqrt();
    let k = target.powf(1.0 - s_exp) / raw.norm_s();
    let pert = Perturbation::new(&model, raw.a().scale(c64::new(k, 0.0)), s_exp).unwrap();
    let s0 = CorrectionS::new(&model, hermitian(&mut r, n, 1.0)).unwrap();
    let corr = CorrectionS::new(&model, s0.s().scale(c64::new(0.3 / s0.kato_a(), 0.0))).unwrap();
    SingularModel::with_default_lambda(model, pert, corr).unwrap()
}

pub fn rel(a: &CMat, b: &CMat) -> f64 {
    krein_core::algebra::rel_diff(a, b)
}
