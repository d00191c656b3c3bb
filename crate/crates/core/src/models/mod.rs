//! Cutoff families and the concrete model generators.

pub mod fock;
pub mod friedrichs;
pub mod nelson;

use alloc::vec::Vec;

use crate::algebra::{check_dims, OpAlgebra};
use crate::error::{Error, Result};
use crate::singular::{default_lambda_circ, CorrectionS, Perturbation, SingularModel};
use crate::spectral::{FreeHamiltonian, OperatorModel};

pub use fock::{fock_build, fock_cutoff_family, van_hove_model, FockSpace, VanHove};
pub use friedrichs::{friedrichs_family, FriedrichsParams};
pub use nelson::{nelson_counterterm, NelsonParams};

/// One cutoff level: `(n, A_n, E_n)`.
#[derive(Debug, Clone)]
pub struct CutoffLevel<M> {
    pub n: usize,
    pub a_n: M,
    pub e_n: M,
}

/// A renormalization scheme `(A_n, E_n)` on a fixed free Hamiltonian, with
/// the data `(A, S)` of the limit operator.
#[derive(Debug, Clone)]
pub struct CutoffFamily<F: FreeHamiltonian> {
    model: F,
    levels: Vec<CutoffLevel<F::Op>>,
    /// `Some(A)` when `A_n → A` is part of the family; `None` when the limit
    /// is singular and `limit_a` is only the largest available truncation.
    target_a: Option<F::Op>,
    limit_a: F::Op,
    s: F::Op,
    s_exponent: f64,
    lambda_circ: f64,
}

impl<F: FreeHamiltonian> CutoffFamily<F> {
    /// Levels must be strictly ascending. `lambda_circ = None` picks the
    /// default reference point of the limit model.
    pub fn new(
        model: F,
        levels: Vec<CutoffLevel<F::Op>>,
        target_a: Option<F::Op>,
        limit_a: F::Op,
        s: F::Op,
        s_exponent: f64,
        lambda_circ: Option<f64>,
    ) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Domain("a cutoff family needs at least one level".into()));
        }
        if levels.windows(2).any(|w| w[0].n >= w[1].n) {
            return Err(Error::Domain("cutoff levels must be strictly ascending".into()));
        }
        let d = model.dim();
        for l in &levels {
            check_dims(d, l.a_n.dim())?;
            check_dims(d, l.e_n.dim())?;
        }
        check_dims(d, limit_a.dim())?;
        check_dims(d, s.dim())?;
        let lambda_circ = match lambda_circ {
            Some(l) => l,
            None => {
                let pert = Perturbation::new(&model, limit_a.clone(), s_exponent)?;
                let corr = CorrectionS::new(&model, s.clone())?;
                default_lambda_circ(&model, &pert, &corr)
            }
        };
        Ok(Self { model, levels, target_a, limit_a, s, s_exponent, lambda_circ })
    }

    /// The family `A_n = A`, `E_n = A R A† + T_S` at every level.
    pub fn constant(limit: &SingularModel<F>, levels: &[usize]) -> Result<Self> {
        let a = limit.a().clone();
        let e = a.mul(limit.g()).add(&limit.t_s());
        let lv = levels.iter().map(|&n| CutoffLevel { n, a_n: a.clone(), e_n: e.clone() }).collect();
        Self::new(
            limit.model().clone(),
            lv,
            Some(a.clone()),
            a,
            limit.corr().s().clone(),
            limit.pert().s_exponent(),
            Some(limit.lambda_circ()),
        )
    }

    pub fn model(&self) -> &F {
        &self.model
    }

    pub fn levels(&self) -> &[CutoffLevel<F::Op>] {
        &self.levels
    }

    pub fn level_indices(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.n).collect()
    }

    pub fn target_a(&self) -> Option<&F::Op> {
        self.target_a.as_ref()
    }

    pub fn limit_a(&self) -> &F::Op {
        &self.limit_a
    }

    pub fn s(&self) -> &F::Op {
        &self.s
    }

    pub fn s_exponent(&self) -> f64 {
        self.s_exponent
    }

    pub fn lambda_circ(&self) -> f64 {
        self.lambda_circ
    }

    /// The Kreĭn model built from `(H, limit_a, S, λ∘)`.
    pub fn limit_model(&self) -> Result<SingularModel<F>> {
        let pert = Perturbation::new(&self.model, self.limit_a.clone(), self.s_exponent)?;
        let corr = CorrectionS::new(&self.model, self.s.clone())?;
        SingularModel::new(self.model.clone(), pert, corr, self.lambda_circ)
    }

    /// `T_S` of the limit model.
    pub fn target_ts(&self) -> Result<F::Op> {
        Ok(self.limit_model()?.t_s())
    }

    /// `max_n max(1, ‖A_n‖_{𝔥_s,𝔉}^{s*})`, including the limit.
    pub fn gamma_threshold(&self) -> Result<f64> {
        let mut g = Perturbation::new(&self.model, self.limit_a.clone(), self.s_exponent)?.norm_power();
        for l in &self.levels {
            g = g.max(Perturbation::new(&self.model, l.a_n.clone(), self.s_exponent)?.norm_power());
        }
        Ok(g.max(1.0))
    }

    /// `γ* = 2 · gamma_threshold`.
    pub fn gamma_star(&self) -> Result<f64> {
        Ok(2.0 * self.gamma_threshold()?)
    }

    /// `E_n − A_n R A_n†` at level index `i`.
    pub fn renormalized_gap(&self, i: usize) -> Result<F::Op> {
        let l = self.level(i)?;
        let r = self.model.resolvent(crate::math::real(self.lambda_circ))?;
        Ok(l.e_n.sub(&l.a_n.mul(&r).mul(&l.a_n.adjoint())))
    }

    pub fn level(&self, i: usize) -> Result<&CutoffLevel<F::Op>> {
        self.levels.get(i).ok_or(Error::Domain(alloc::format!("no cutoff level at index {i}")))
    }

    /// Largest `‖E_n − E_n†‖` over levels.
    pub fn max_counterterm_asymmetry(&self) -> f64 {
        self.levels
            .iter()
            .map(|l| crate::algebra::diff_norm(&l.e_n, &l.e_n.adjoint()))
            .fold(0.0, f64::max)
    }
}

impl CutoffFamily<crate::spectral::DiagonalModel> {
    /// The same family with dense operators.
    pub fn densify(&self) -> Result<CutoffFamily<OperatorModel>> {
        let levels = self
            .levels
            .iter()
            .map(|l| CutoffLevel { n: l.n, a_n: l.a_n.to_dense(), e_n: l.e_n.to_dense() })
            .collect();
        CutoffFamily::new(
            self.model.to_dense()?,
            levels,
            self.target_a.as_ref().map(|a| a.to_dense()),
            self.limit_a.to_dense(),
            self.s.to_dense(),
            self.s_exponent,
            Some(self.lambda_circ),
        )
    }
}
