//! Friedrichs-type family on `H = diag(1, …, N)`: a single bound mode `φ = e_1`
//! coupled to the continuum through `v_k = k^{s − 1/2 − eps}` truncated at `n`.
//!
//! `A_n = c · φ ⟨v^{(n)}, ·⟩` and `E_n = A_n R A_n† = c² ⟨v^{(n)}, R v^{(n)}⟩ φφ†`.
//! The self-energy diverges as `n → ∞` exactly when `s ≥ 1/2 + eps`, while
//! `A_n` stays bounded on `𝔥_{s'}` for `s' > s − eps`.

use alloc::vec::Vec;

use faer::c64;

use crate::error::{Error, Result};
use crate::lowrank::DiagLowRank;
use crate::math::{powf, real};
use crate::models::{CutoffFamily, CutoffLevel};
use crate::spectral::DiagonalModel;
use crate::OpAlgebra;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FriedrichsParams {
    pub dim_max: usize,
    pub s: f64,
    pub eps: f64,
    pub coupling: f64,
}

impl Default for FriedrichsParams {
    fn default() -> Self {
        Self { dim_max: 4096, s: 0.8, eps: 0.05, coupling: 1.0 }
    }
}

impl FriedrichsParams {
    pub fn validate(&self) -> Result<()> {
        if self.dim_max < 16 {
            return Err(Error::Domain(alloc::format!("dim_max {} below 16", self.dim_max)));
        }
        if !(self.s > 0.0 && self.s < 1.0) {
            return Err(Error::Domain(alloc::format!("s = {} outside (0, 1)", self.s)));
        }
        if !(self.eps > 0.0) {
            return Err(Error::Domain(alloc::format!("eps = {} must be positive", self.eps)));
        }
        if !self.coupling.is_finite() {
            return Err(Error::Domain("coupling must be finite".into()));
        }
        Ok(())
    }

    /// `v^{(n)}` padded with zeros to `dim_max`.
    pub fn profile(&self, n: usize) -> Vec<c64> {
        let p = self.s - 0.5 - self.eps;
        (1..=self.dim_max)
            .map(|k| if k <= n { real(powf(k as f64, p)) } else { real(0.0) })
            .collect()
    }

    pub fn model(&self) -> Result<DiagonalModel> {
        DiagonalModel::new((1..=self.dim_max).map(|k| k as f64).collect())
    }

    /// `A_n = c · e_1 v^{(n)}†`.
    pub fn a_n(&self, n: usize) -> Result<DiagLowRank> {
        let mut phi = alloc::vec![real(0.0); self.dim_max];
        phi[0] = real(1.0);
        DiagLowRank::outer(&phi, &self.profile(n), real(self.coupling))
    }

    /// `⟨v^{(n)}, R_λ v^{(n)}⟩ = Σ_{k ≤ n} v_k² / (λ − k)`, negative below
    /// the spectrum.
    pub fn self_energy(&self, n: usize, lambda_circ: f64) -> f64 {
        let p = 2.0 * (self.s - 0.5 - self.eps);
        (1..=n.min(self.dim_max)).map(|k| powf(k as f64, p) / (lambda_circ - k as f64)).sum()
    }
}

/// Levels must lie in `[1, dim_max]`. With `lambda_circ = None` the reference
/// point is the default for the full-profile limit.
pub fn friedrichs_family(
    params: &FriedrichsParams,
    levels: &[usize],
    lambda_circ: Option<f64>,
) -> Result<CutoffFamily<DiagonalModel>> {
    params.validate()?;
    if let Some(&bad) = levels.iter().find(|&&n| n == 0 || n > params.dim_max) {
        return Err(Error::Domain(alloc::format!("cutoff {bad} outside [1, {}]", params.dim_max)));
    }
    let model = params.model()?;
    let n = params.dim_max;
    let limit_a = params.a_n(n)?;
    let s = DiagLowRank::zeros(n);
    // Build with a placeholder so the default reference point is available.
    let shell = CutoffFamily::new(
        model.clone(),
        alloc::vec![CutoffLevel { n: 1, a_n: s.clone(), e_n: s.clone() }],
        None,
        limit_a.clone(),
        s.clone(),
        params.s,
        lambda_circ,
    )?;
    let lc = shell.lambda_circ();
    let mut phi = alloc::vec![real(0.0); n];
    phi[0] = real(1.0);
    let lv = levels
        .iter()
        .map(|&k| {
            let e = params.coupling * params.coupling * params.self_energy(k, lc);
            Ok(CutoffLevel { n: k, a_n: params.a_n(k)?, e_n: DiagLowRank::outer(&phi, &phi, real(e))? })
        })
        .collect::<Result<Vec<_>>>()?;
    CutoffFamily::new(model, lv, None, limit_a, s, params.s, Some(lc))
}
