//! The singular-perturbation pipeline: `G_z`, `𝔾_z`, `M_z`, `T_S`, `Θ_S`, the
//! Kreĭn resolvent, invertibility thresholds, the change of reference point
//! `λ∘ → λ` and the regularized (cutoff) resolvent.
//!
//! Everything is generic over the free Hamiltonian, so the same code runs on
//! dense matrices and on the diagonal-plus-low-rank backend.

use alloc::vec::Vec;

use faer::c64;

use crate::algebra::{check_dims, hermiticity_defect, OpAlgebra};
use crate::block::{schur_invert, schur_invert_with_path, BlockOp2, BlockRow, InversionPath};
use crate::error::{Error, Result};
use crate::math::{powf, real, sqrt};
use crate::spectral::FreeHamiltonian;

/// Regularizer in the Kato ratio `‖Sψ_k‖ / (‖Hψ_k‖ + ε)`.
pub const KATO_EPS: f64 = 1e-12;
/// Upper cap on the estimated relative bound `a`.
pub const KATO_A_CAP: f64 = 0.999;

/// The annihilation-type map `A` with its declared smoothness exponent.
#[derive(Debug, Clone)]
pub struct Perturbation<M> {
    a: M,
    s_exponent: f64,
    norm_s: f64,
}

impl<M: OpAlgebra> Perturbation<M> {
    /// Caches `‖A‖_{𝔥_s,𝔉} = ‖A (H²+1)^{−s/2}‖`.
    pub fn new<F: FreeHamiltonian<Op = M>>(model: &F, a: M, s_exponent: f64) -> Result<Self> {
        check_dims(model.dim(), a.dim())?;
        if !(s_exponent > 0.0 && s_exponent < 1.0) {
            return Err(Error::Domain(alloc::format!("smoothness exponent {s_exponent} outside (0, 1)")));
        }
        let w = model.scale_weight(-s_exponent)?;
        let norm_s = a.mul(&w.w).norm2();
        Ok(Self { a, s_exponent, norm_s })
    }

    pub fn a(&self) -> &M {
        &self.a
    }

    pub fn s_exponent(&self) -> f64 {
        self.s_exponent
    }

    pub fn norm_s(&self) -> f64 {
        self.norm_s
    }

    /// `s* = 1/(1 − s)`.
    pub fn s_star(&self) -> f64 {
        1.0 / (1.0 - self.s_exponent)
    }

    /// `‖A‖_{𝔥_s,𝔉}^{s*}`.
    pub fn norm_power(&self) -> f64 {
        powf(self.norm_s, self.s_star())
    }
}

/// The symmetric correction `S` with estimated Kato constants.
#[derive(Debug, Clone)]
pub struct CorrectionS<M> {
    s: M,
    kato_a: f64,
    kato_b: f64,
}

impl<M: OpAlgebra> CorrectionS<M> {
    /// Hermitizes `S` and estimates `‖Sψ‖ ≤ a‖Hψ‖ + b‖ψ‖` on the eigenbasis.
    pub fn new<F: FreeHamiltonian<Op = M>>(model: &F, s: M) -> Result<Self> {
        check_dims(model.dim(), s.dim())?;
        let s = s.hermitian_part();
        let cols = model.eigen_column_norms(&s);
        let kato_a = cols
            .iter()
            .zip(model.eigvals())
            .map(|(sn, lam)| sn / (lam.abs() + KATO_EPS))
            .fold(0.0, f64::max)
            .min(KATO_A_CAP);
        let kato_b = s.norm2();
        Ok(Self { s, kato_a, kato_b })
    }

    pub fn zero<F: FreeHamiltonian<Op = M>>(model: &F) -> Self {
        Self { s: M::zeros(model.dim()), kato_a: 0.0, kato_b: 0.0 }
    }

    pub fn s(&self) -> &M {
        &self.s
    }

    pub fn kato_a(&self) -> f64 {
        self.kato_a
    }

    pub fn kato_b(&self) -> f64 {
        self.kato_b
    }
}

/// `λ_inf − 2·max(√(λ_inf²+1), ‖A‖^{s*}, b/(1−a))`.
pub fn default_lambda_circ<F: FreeHamiltonian>(
    model: &F,
    pert: &Perturbation<F::Op>,
    corr: &CorrectionS<F::Op>,
) -> f64 {
    let li = model.lambda_inf();
    li - 2.0 * threshold_margin(li, pert.norm_power(), corr)
}

fn threshold_margin<M>(lambda_inf: f64, norm_power: f64, corr: &CorrectionS<M>) -> f64 {
    sqrt(lambda_inf * lambda_inf + 1.0)
        .max(norm_power)
        .max(corr.kato_b / (1.0 - corr.kato_a))
}

/// Output of [`SingularModel::s_tilde`].
#[derive(Debug, Clone)]
pub struct Reparametrized<M> {
    pub corr: CorrectionS<M>,
    /// `‖S̃ − S̃†‖ / max(‖S̃‖, 1)` before hermitization.
    pub asymmetry: f64,
}

/// `(H, A, S, λ∘)` with `R = R_{λ∘}` and `G = G_{λ∘}` cached.
#[derive(Debug, Clone)]
pub struct SingularModel<F: FreeHamiltonian> {
    model: F,
    pert: Perturbation<F::Op>,
    corr: CorrectionS<F::Op>,
    lambda_circ: f64,
    r: F::Op,
    g: F::Op,
    a_adj: F::Op,
}

impl<F: FreeHamiltonian> SingularModel<F> {
    pub fn new(model: F, pert: Perturbation<F::Op>, corr: CorrectionS<F::Op>, lambda_circ: f64) -> Result<Self> {
        check_dims(model.dim(), pert.a.dim())?;
        check_dims(model.dim(), corr.s.dim())?;
        let li = model.lambda_inf();
        if !(lambda_circ < li) {
            return Err(Error::Domain(alloc::format!("lambda_circ {lambda_circ} not below inf spectrum {li}")));
        }
        let r = model.resolvent(real(lambda_circ))?.hermitian_part();
        let a_adj = pert.a.adjoint();
        let g = r.mul(&a_adj);
        Ok(Self { model, pert, corr, lambda_circ, r, g, a_adj })
    }

    /// Uses [`default_lambda_circ`].
    pub fn with_default_lambda(model: F, pert: Perturbation<F::Op>, corr: CorrectionS<F::Op>) -> Result<Self> {
        let lc = default_lambda_circ(&model, &pert, &corr);
        Self::new(model, pert, corr, lc)
    }

    pub fn model(&self) -> &F {
        &self.model
    }

    pub fn pert(&self) -> &Perturbation<F::Op> {
        &self.pert
    }

    pub fn corr(&self) -> &CorrectionS<F::Op> {
        &self.corr
    }

    pub fn lambda_circ(&self) -> f64 {
        self.lambda_circ
    }

    /// `R = R_{λ∘}`.
    pub fn r(&self) -> &F::Op {
        &self.r
    }

    /// `G = G_{λ∘}`.
    pub fn g(&self) -> &F::Op {
        &self.g
    }

    pub fn a(&self) -> &F::Op {
        &self.pert.a
    }

    /// `G_z = R_z A†`.
    pub fn g_z(&self, z: c64) -> Result<F::Op> {
        Ok(self.model.resolvent(z)?.mul(&self.a_adj))
    }

    /// `(A R_z̄)†`, the defining form of `G_z`.
    pub fn g_z_from_adjoint(&self, z: c64) -> Result<F::Op> {
        Ok(self.pert.a.mul(&self.model.resolvent(z.conj())?).adjoint())
    }

    /// `𝔾_z = [G_z | R_z]`.
    pub fn gg_z(&self, z: c64) -> Result<BlockRow<F::Op>> {
        let rz = self.model.resolvent(z)?;
        Ok(BlockRow { left: rz.mul(&self.a_adj), right: rz })
    }

    /// `M_z = 𝔸(𝔾 − 𝔾_z)`, i.e.
    /// `[[A(G − G_z), A(R − R_z)], [G − G_z, R − R_z]]`.
    pub fn m_z(&self, z: c64) -> Result<BlockOp2<F::Op>> {
        let rz = self.model.resolvent(z)?;
        let dr = self.r.sub(&rz);
        let dg = dr.mul(&self.a_adj);
        let a = &self.pert.a;
        Ok(BlockOp2 { a11: a.mul(&dg), a12: a.mul(&dr), a21: dg, a22: dr })
    }

    /// `(z − λ∘) 𝔾† 𝔾_z`, the product form of `M_z`.
    pub fn m_z_product(&self, z: c64) -> Result<BlockOp2<F::Op>> {
        let gg = BlockRow { left: self.g.clone(), right: self.r.clone() };
        Ok(gg.adjoint_times(&self.gg_z(z)?).scale(z - real(self.lambda_circ)))
    }

    /// `T_S = (1 − G†) S (1 − G)`.
    pub fn t_s(&self) -> F::Op {
        let omg = self.g.one_minus();
        omg.adjoint().mul(&self.corr.s).mul(&omg).hermitian_part()
    }

    /// `Θ_S = [[T_S, 1 − G†], [1 − G, −R]]`.
    pub fn theta_s(&self) -> BlockOp2<F::Op> {
        let a21 = self.g.one_minus();
        BlockOp2 { a11: self.t_s(), a12: a21.adjoint(), a21, a22: self.r.scale(real(-1.0)) }
    }

    /// `𝕊 = [[S, 1], [1, −R]]`.
    pub fn s_block(&self) -> BlockOp2<F::Op> {
        let n = self.model.dim();
        BlockOp2 {
            a11: self.corr.s.clone(),
            a12: F::Op::identity(n),
            a21: F::Op::identity(n),
            a22: self.r.scale(real(-1.0)),
        }
    }

    /// `diag(1 − G†, 1) · 𝕊 · diag(1 − G, 1)`.
    pub fn theta_s_factored(&self) -> BlockOp2<F::Op> {
        let n = self.model.dim();
        let omg = self.g.one_minus();
        let left = BlockOp2 { a11: omg.adjoint(), a12: F::Op::zeros(n), a21: F::Op::zeros(n), a22: F::Op::identity(n) };
        let right = BlockOp2 { a11: omg, a12: F::Op::zeros(n), a21: F::Op::zeros(n), a22: F::Op::identity(n) };
        left.mul(&self.s_block()).mul(&right)
    }

    pub fn theta_plus_m(&self, z: c64) -> Result<BlockOp2<F::Op>> {
        Ok(self.theta_s().add(&self.m_z(z)?))
    }

    /// `R̂_z = R_z + 𝔾_z (Θ_S + M_z)⁻¹ 𝔾_z̄†`.
    pub fn krein_resolvent(&self, z: c64) -> Result<F::Op> {
        self.krein_resolvent_with_path(z).map(|(r, _)| r)
    }

    pub fn krein_resolvent_with_path(&self, z: c64) -> Result<(F::Op, InversionPath)> {
        let ggz = self.gg_z(z)?;
        let ggzb = self.gg_z(z.conj())?;
        let (lam, path) = schur_invert_with_path(&self.theta_plus_m(z)?).map_err(|e| theta_error(e, z))?;
        Ok((ggz.right.add(&ggz.sandwich(&lam, &ggzb)), path))
    }

    /// `H_S = H + A† + A − A R A† − T_S`, the operator whose resolvent
    /// [`Self::krein_resolvent`] is.
    pub fn h_s_direct(&self) -> F::Op {
        let a = &self.pert.a;
        self.model
            .h_op()
            .add(&self.a_adj)
            .add(a)
            .sub(&a.mul(&self.g))
            .sub(&self.t_s())
    }

    /// `λ_inf − max(√(λ_inf²+1), ‖A‖^{s*})`.
    pub fn lambda_threshold(&self) -> f64 {
        let li = self.model.lambda_inf();
        li - sqrt(li * li + 1.0).max(self.pert.norm_power())
    }

    /// `max(1, ‖A‖^{s*})`.
    pub fn gamma_threshold(&self) -> f64 {
        self.pert.norm_power().max(1.0)
    }

    /// The reference point must lie below this for `Θ_S` to be invertible:
    /// `lambda_threshold` tightened by `b/(1−a)`.
    pub fn kr_threshold(&self) -> f64 {
        let li = self.model.lambda_inf();
        li - threshold_margin(li, self.pert.norm_power(), &self.corr)
    }

    /// `γ* = 2 · gamma_threshold`.
    pub fn gamma_star(&self) -> f64 {
        2.0 * self.gamma_threshold()
    }

    /// `iγ*`, `1 + 2i`, `−3 + 0.5i`.
    pub fn probe_points(&self) -> Vec<c64> {
        alloc::vec![c64::new(0.0, self.gamma_star()), c64::new(1.0, 2.0), c64::new(-3.0, 0.5)]
    }

    /// `S̃ = (1 − G_λ†)⁻¹ (A(G − G_λ) + T_S) (1 − G_λ)⁻¹`, hermitized.
    pub fn s_tilde(&self, lambda_new: f64) -> Result<Reparametrized<F::Op>> {
        let threshold = self.lambda_threshold();
        let at_circ = lambda_new == self.lambda_circ;
        if !at_circ && !(lambda_new < threshold) {
            return Err(Error::NotBelowThreshold { lambda: lambda_new, threshold });
        }
        let g_l = self.model.resolvent(real(lambda_new))?.mul(&self.a_adj);
        let (x, _) = g_l
            .one_minus()
            .inverse_cond()
            .ok_or(Error::NotBelowThreshold { lambda: lambda_new, threshold })?;
        let mid = self.pert.a.mul(&self.g.sub(&g_l)).add(&self.t_s());
        let raw = x.adjoint().mul(&mid).mul(&x);
        let asymmetry = hermiticity_defect(&raw);
        let corr = CorrectionS::new(&self.model, raw)?;
        Ok(Reparametrized { corr, asymmetry })
    }

    /// The same operator in coordinates `(λ, S̃)`.
    pub fn reparametrize(&self, lambda_new: f64) -> Result<(Self, f64)> {
        let rep = self.s_tilde(lambda_new)?;
        let sm = Self::new(self.model.clone(), self.pert.clone(), rep.corr, lambda_new)?;
        Ok((sm, rep.asymmetry))
    }
}

fn theta_error(e: Error, z: c64) -> Error {
    match e {
        Error::SingularBlock { condition } => Error::ThetaSingular { re: z.re, im: z.im, condition },
        other => other,
    }
}

/// `H_n − E_n = H + A_n† + A_n − E_n`.
pub fn cutoff_hamiltonian<F: FreeHamiltonian>(model: &F, a_n: &F::Op, e_n: &F::Op) -> F::Op {
    model.h_op().add(&a_n.adjoint()).add(a_n).sub(e_n)
}

/// `Θ_n = [[E_n − A_n R A_n†, 1 − G_n†], [1 − G_n, −R]]` with `G_n = R A_n†`.
pub fn theta_n<F: FreeHamiltonian>(model: &F, a_n: &F::Op, e_n: &F::Op, lambda_circ: f64) -> Result<BlockOp2<F::Op>> {
    check_dims(model.dim(), a_n.dim())?;
    check_dims(model.dim(), e_n.dim())?;
    let r = model.resolvent(real(lambda_circ))?.hermitian_part();
    let g_n = r.mul(&a_n.adjoint());
    let a21 = g_n.one_minus();
    Ok(BlockOp2 {
        a11: e_n.sub(&a_n.mul(&g_n)),
        a12: a21.adjoint(),
        a21,
        a22: r.scale(real(-1.0)),
    })
}

/// `M_{n,z}`, built like [`SingularModel::m_z`] with `A_n` in place of `A`.
pub fn m_n_z<F: FreeHamiltonian>(model: &F, a_n: &F::Op, lambda_circ: f64, z: c64) -> Result<BlockOp2<F::Op>> {
    let r = model.resolvent(real(lambda_circ))?;
    let rz = model.resolvent(z)?;
    let dr = r.sub(&rz);
    let dg = dr.mul(&a_n.adjoint());
    Ok(BlockOp2 { a11: a_n.mul(&dg), a12: a_n.mul(&dr), a21: dg, a22: dr })
}

/// `R_z + 𝔾_{n,z} (Θ_n + M_{n,z})⁻¹ 𝔾_{n,z̄}†`.
pub fn regularized_resolvent<F: FreeHamiltonian>(
    model: &F,
    a_n: &F::Op,
    e_n: &F::Op,
    lambda_circ: f64,
    z: c64,
) -> Result<F::Op> {
    let block = theta_n(model, a_n, e_n, lambda_circ)?.add(&m_n_z(model, a_n, lambda_circ, z)?);
    let lam = schur_invert(&block).map_err(|e| theta_error(e, z))?;
    let a_adj = a_n.adjoint();
    let rz = model.resolvent(z)?;
    let rzb = model.resolvent(z.conj())?;
    let ggz = BlockRow { left: rz.mul(&a_adj), right: rz };
    let ggzb = BlockRow { left: rzb.mul(&a_adj), right: rzb };
    Ok(ggz.right.add(&ggz.sandwich(&lam, &ggzb)))
}

/// Top-left block of `(Θ_n + M_{n,z})⁻¹`: the inverse of its second Schur
/// complement, which is `−(H_n − E_n) + z`.
pub fn regularized_schur_inverse<F: FreeHamiltonian>(
    model: &F,
    a_n: &F::Op,
    e_n: &F::Op,
    lambda_circ: f64,
    z: c64,
) -> Result<F::Op> {
    let block = theta_n(model, a_n, e_n, lambda_circ)?.add(&m_n_z(model, a_n, lambda_circ, z)?);
    Ok(schur_invert(&block).map_err(|e| theta_error(e, z))?.a11)
}

/// `(−(H_n − E_n) + z)⁻¹` by direct inversion.
pub fn direct_cutoff_resolvent<F: FreeHamiltonian>(model: &F, a_n: &F::Op, e_n: &F::Op, z: c64) -> Result<F::Op> {
    direct_resolvent(&cutoff_hamiltonian(model, a_n, e_n), z)
}

/// `(−X + z)⁻¹` by direct inversion.
pub fn direct_resolvent<M: OpAlgebra>(x: &M, z: c64) -> Result<M> {
    x.scale(real(-1.0))
        .shift(z)
        .inverse_cond()
        .map(|(inv, _)| inv)
        .ok_or(Error::SpectrumHit { re: z.re, im: z.im, distance: 0.0, guard: 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rel_diff, CMat};
    use crate::spectral::OperatorModel;
    use faer::Mat;

    fn mat(n: usize, seed: f64, scale: f64) -> CMat {
        Mat::from_fn(n, n, |i, j| {
            let t = seed * (1.0 + i as f64) + 0.61 * (j as f64 + 1.0) * seed;
            c64::new(libm::sin(t), libm::cos(1.7 * t + i as f64)) * scale
        })
    }

    fn sample(n: usize) -> SingularModel<OperatorModel> {
        let h = OperatorModel::new(&mat(n, 0.4, 3.0)).unwrap();
        let a = Perturbation::new(&h, mat(n, 0.9, 0.5), 0.5).unwrap();
        let s = CorrectionS::new(&h, mat(n, 1.3, 0.2)).unwrap();
        SingularModel::with_default_lambda(h, a, s).unwrap()
    }

    #[test]
    fn g_z_two_forms_agree() {
        let sm = sample(6);
        let z = c64::new(0.3, 1.2);
        assert!(rel_diff(&sm.g_z(z).unwrap(), &sm.g_z_from_adjoint(z).unwrap()) < 1e-12);
    }

    #[test]
    fn m_z_vanishes_at_reference_point() {
        let sm = sample(5);
        let m = sm.m_z(real(sm.lambda_circ())).unwrap();
        assert_eq!(m.max_block_norm(), 0.0);
    }

    #[test]
    fn theta_is_block_symmetric() {
        let sm = sample(5);
        let th = sm.theta_s();
        assert_eq!(th.a21.adjoint().to_owned(), th.a12);
        assert!(th.is_symmetric(1e-13));
    }

    #[test]
    fn krein_matches_direct() {
        let sm = sample(7);
        for z in sm.probe_points() {
            let k = sm.krein_resolvent(z).unwrap();
            let d = direct_resolvent(&sm.h_s_direct(), z).unwrap();
            assert!(rel_diff(&k, &d) < 1e-10, "z = {z}");
        }
    }

    #[test]
    fn regularized_schur_complement_is_the_resolvent() {
        let sm = sample(6);
        let e_n = mat(6, 2.3, 0.3).hermitian_part();
        let z = c64::new(-0.5, 2.0);
        let d = direct_cutoff_resolvent(sm.model(), sm.a(), &e_n, z).unwrap();
        let k = regularized_resolvent(sm.model(), sm.a(), &e_n, sm.lambda_circ(), z).unwrap();
        let s = regularized_schur_inverse(sm.model(), sm.a(), &e_n, sm.lambda_circ(), z).unwrap();
        assert!(rel_diff(&k, &d) < 1e-10);
        assert!(rel_diff(&s, &d) < 1e-10);
    }

    #[test]
    fn threshold_examples() {
        let h = OperatorModel::from_diagonal(&[0.0, 1.0]).unwrap();
        let a = Perturbation::new(&h, crate::algebra::zero_mat(2), 0.5).unwrap();
        let sm = SingularModel::new(h, a, CorrectionS::new(&OperatorModel::from_diagonal(&[0.0, 1.0]).unwrap(), crate::algebra::zero_mat(2)).unwrap(), -3.0).unwrap();
        assert_eq!(sm.lambda_threshold(), -1.0);
        assert_eq!(sm.gamma_threshold(), 1.0);
    }

    #[test]
    fn s_tilde_at_same_point_is_s() {
        let sm = sample(5);
        let rep = sm.s_tilde(sm.lambda_circ()).unwrap();
        assert!(rel_diff(rep.corr.s(), sm.corr().s()) < 1e-12);
    }

    #[test]
    fn s_tilde_above_threshold_is_rejected() {
        let sm = sample(4);
        let t = sm.lambda_threshold();
        assert!(matches!(sm.s_tilde(t + 0.5), Err(Error::NotBelowThreshold { .. })));
    }

    #[test]
    fn lambda_circ_must_be_below_spectrum() {
        let h = OperatorModel::from_diagonal(&[1.0, 2.0]).unwrap();
        let a = Perturbation::new(&h, crate::algebra::zero_mat(2), 0.5).unwrap();
        let s = CorrectionS::zero(&h);
        assert!(matches!(SingularModel::new(h, a, s, 1.5), Err(Error::Domain(_))));
    }
}
