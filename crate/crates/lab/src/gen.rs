//! Seeded random models.
//!
//! `H` is a symmetrized complex Gaussian matrix. `A` is Gaussian, rescaled so
//! that `‖A‖_{𝔥_s,𝔉}^{s*} = c·√(λ_inf²+1)` with `c ∈ [1, 2]`, which puts
//! `lambda_threshold` in the band `λ_inf − [1, 2]·√(λ_inf²+1)`. `S` is a
//! Hermitian Gaussian matrix rescaled to relative bound `kato_a = 0.3`.

use faer::Mat;
use krein_core::singular::{default_lambda_circ, CorrectionS, Perturbation, SingularModel};
use krein_core::{c64, CMat, FreeHamiltonian, OpAlgebra, OperatorModel, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub const KATO_TARGET: f64 = 0.3;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derived seed for the `i`-th model of a run.
pub fn sub_seed(seed: u64, i: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i.wrapping_mul(0xBF58_476D_1CE4_E5B9))
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

pub fn free_model(rng: &mut ChaCha8Rng, n: usize) -> Result<OperatorModel> {
    OperatorModel::new(&hermitian(rng, n, 1.0))
}

/// `(H, A, S)` on `n` dimensions at the default reference point.
pub fn singular_model(seed: u64, n: usize) -> Result<SingularModel<OperatorModel>> {
    let mut r = rng(seed);
    let model = free_model(&mut r, n)?;
    let s_exp = r.gen_range(0.3..0.7);
    let raw = gaussian(&mut r, n, 1.0);
    let pert = Perturbation::new(&model, raw.clone(), s_exp)?;
    let li = model.lambda_inf();
    let target = r.gen_range(1.0..2.0) * (li * li + 1.0).sqrt();
    let k = target.powf(1.0 - s_exp) / pert.norm_s();
    let pert = Perturbation::new(&model, raw.scale(c64::new(k, 0.0)), s_exp)?;
    let corr = correction(&mut r, &model)?;
    SingularModel::with_default_lambda(model, pert, corr)
}

/// The same `H` and `S` as [`singular_model`] with `A = 0`.
pub fn unperturbed_model(seed: u64, n: usize) -> Result<SingularModel<OperatorModel>> {
    let mut r = rng(seed);
    let model = free_model(&mut r, n)?;
    let pert = Perturbation::new(&model, CMat::zeros(n, n), 0.5)?;
    let corr = correction(&mut r, &model)?;
    SingularModel::with_default_lambda(model, pert, corr)
}

fn correction(r: &mut ChaCha8Rng, model: &OperatorModel) -> Result<CorrectionS<CMat>> {
    let mut c = CorrectionS::new(model, hermitian(r, model.dim(), 1.0))?;
    // the estimate is capped, so rescale until it is back in its linear range
    for _ in 0..64 {
        if (c.kato_a() - KATO_TARGET).abs() < 1e-13 {
            break;
        }
        c = CorrectionS::new(model, c.s().scale(c64::new(KATO_TARGET / c.kato_a(), 0.0)))?;
    }
    Ok(c)
}

/// A cutoff pair `(A_n, E_n)` on `model` with a reference point below the
/// default threshold of `A_n`.
pub fn cutoff_pair(rng: &mut ChaCha8Rng, model: &OperatorModel) -> Result<(CMat, CMat, f64)> {
    let n = model.dim();
    let a_n = gaussian(rng, n, 0.5);
    let e_n = hermitian(rng, n, 0.5);
    let pert = Perturbation::new(model, a_n.clone(), 0.5)?;
    let lc = default_lambda_circ(model, &pert, &CorrectionS::zero(model));
    Ok((a_n, e_n, lc))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_models_are_reproducible() {
        let a = singular_model(7, 6).unwrap();
        let b = singular_model(7, 6).unwrap();
        assert_eq!(a.model().h(), b.model().h());
        assert_eq!(a.a(), b.a());
        assert_ne!(singular_model(8, 6).unwrap().a(), a.a());
    }

    #[test]
    fn calibration_bands() {
        for seed in 0..10 {
            let sm = singular_model(seed, 10).unwrap();
            let li = sm.model().lambda_inf();
            let scale = (li * li + 1.0).sqrt();
            let ratio = sm.pert().norm_power() / scale;
            assert!((1.0 - 1e-9..2.0 + 1e-9).contains(&ratio), "{ratio}");
            assert!((sm.corr().kato_a() - KATO_TARGET).abs() < 1e-12);
        }
    }
}
