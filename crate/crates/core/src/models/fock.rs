//! Bosonic Fock space over finitely many modes, truncated at total particle
//! number `M`.
//!
//! The basis is graded lexicographic: states are ordered by total number,
//! then lexicographically by occupation tuple, so the vacuum is index 0.
//! `a(v)` is the exact restriction of the annihilator, and `a†(v)` is its
//! matrix adjoint, which annihilates the top sector.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use faer::{c64, Mat};

use crate::algebra::CMat;
use crate::error::{Error, Result};
use crate::math::{real, sqrt};
use crate::models::{CutoffFamily, CutoffLevel};
use crate::singular::{CorrectionS, Perturbation};
use crate::spectral::{FreeHamiltonian, OperatorModel};
use crate::OpAlgebra;

#[derive(Debug, Clone)]
pub struct FockSpace {
    mode_freqs: Vec<f64>,
    max_total: u32,
    basis: Vec<Vec<u32>>,
    index: BTreeMap<Vec<u32>, usize>,
}

fn compositions(modes: usize, total: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if prefix.len() + 1 == modes {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in 0..=total {
        prefix.push(first);
        compositions(modes, total - first, prefix, out);
        prefix.pop();
    }
}

/// Enumerates all occupation tuples with `Σ n_j ≤ M`.
pub fn fock_build(mode_freqs: &[f64], max_total: u32) -> Result<FockSpace> {
    if mode_freqs.is_empty() {
        return Err(Error::Domain("need at least one mode".into()));
    }
    if let Some(w) = mode_freqs.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
        return Err(Error::Domain(alloc::format!("mode frequency {w} must be positive")));
    }
    if max_total == 0 {
        return Err(Error::Domain("particle-number truncation must be at least 1".into()));
    }
    let mut basis = Vec::new();
    for t in 0..=max_total {
        compositions(mode_freqs.len(), t, &mut Vec::new(), &mut basis);
    }
    let index = basis.iter().enumerate().map(|(i, b)| (b.clone(), i)).collect();
    Ok(FockSpace { mode_freqs: mode_freqs.to_vec(), max_total, basis, index })
}

impl FockSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn modes(&self) -> usize {
        self.mode_freqs.len()
    }

    pub fn mode_freqs(&self) -> &[f64] {
        &self.mode_freqs
    }

    pub fn max_total(&self) -> u32 {
        self.max_total
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    pub fn index_of(&self, occ: &[u32]) -> Option<usize> {
        self.index.get(occ).copied()
    }

    pub fn total(&self, i: usize) -> u32 {
        self.basis[i].iter().sum()
    }

    fn check_vector(&self, v: &[c64]) -> Result<()> {
        if v.len() != self.modes() {
            return Err(Error::DimensionMismatch { expected: self.modes(), got: v.len() });
        }
        Ok(())
    }

    /// `a(v) = Σ_j v̄_j a_j` with `a_j |n⟩ = √n_j |n − e_j⟩`.
    pub fn annihilation(&self, v: &[c64]) -> Result<CMat> {
        self.check_vector(v)?;
        let d = self.dim();
        let mut m = Mat::zeros(d, d);
        for (col, occ) in self.basis.iter().enumerate() {
            for j in 0..occ.len() {
                if occ[j] == 0 || v[j] == real(0.0) {
                    continue;
                }
                let mut lower = occ.clone();
                lower[j] -= 1;
                let row = self.index[&lower];
                m[(row, col)] += v[j].conj() * sqrt(occ[j] as f64);
            }
        }
        Ok(m)
    }

    /// `a†(v) = a(v)†`.
    pub fn creation(&self, v: &[c64]) -> Result<CMat> {
        Ok(self.annihilation(v)?.adjoint().to_owned())
    }

    /// `dΓ(ω)`, diagonal with entries `Σ_j n_j ω_j`.
    pub fn dgamma_diag(&self) -> Vec<f64> {
        self.basis
            .iter()
            .map(|occ| occ.iter().zip(&self.mode_freqs).map(|(&n, w)| n as f64 * w).sum())
            .collect()
    }

    pub fn dgamma(&self) -> CMat {
        let d = self.dgamma_diag();
        Mat::from_fn(d.len(), d.len(), |i, j| if i == j { real(d[i]) } else { real(0.0) })
    }

    /// Indices of states with `Σ n_j ≤ M − 1`.
    pub fn interior(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.total(i) < self.max_total).collect()
    }

    /// `max |([a(v), a†(w)] − ⟨v, w⟩)_{ij}|` over interior `i, j`.
    pub fn ccr_defect(&self, v: &[c64], w: &[c64]) -> Result<f64> {
        let a = self.annihilation(v)?;
        let ad = self.creation(w)?;
        let comm = &a * &ad - &ad * &a;
        let ip: c64 = v.iter().zip(w).map(|(x, y)| x.conj() * y).sum();
        let inner = self.interior();
        let mut worst = 0.0f64;
        for &i in &inner {
            for &j in &inner {
                let expect = if i == j { ip } else { real(0.0) };
                worst = worst.max((comm[(i, j)] - expect).norm());
            }
        }
        Ok(worst)
    }
}

/// Exactly solvable `dΓ(ω) + a(v) + a†(v)`.
#[derive(Debug, Clone)]
pub struct VanHove {
    pub model: OperatorModel,
    pub pert: Perturbation<CMat>,
    /// `−Σ_j |v_j|² / ω_j`, the ground energy without truncation.
    pub exact_energy: f64,
}

impl VanHove {
    /// Lowest eigenvalue of the truncated `H + A† + A`.
    pub fn truncated_ground_energy(&self) -> Result<f64> {
        let a = self.pert.a();
        let h = self.model.h() + a + a.adjoint();
        let (vals, _) = crate::algebra::dense_eigh(&h)?;
        Ok(vals[0])
    }
}

pub fn van_hove_model(fock: &FockSpace, v: &[c64], s_exponent: f64) -> Result<VanHove> {
    fock.check_vector(v)?;
    let model = OperatorModel::new(&fock.dgamma())?;
    let a = fock.annihilation(v)?;
    let pert = Perturbation::new(&model, a, s_exponent)?;
    let exact_energy = -v.iter().zip(fock.mode_freqs()).map(|(x, w)| x.norm_sqr() / w).sum::<f64>();
    Ok(VanHove { model, pert, exact_energy })
}

/// `A_n = a(v^{(n)})` with `v^{(n)}` the profile restricted to the first `n`
/// modes, `E_n = A_n R A_n† + (1 − G_n†) S (1 − G_n)`.
pub fn fock_cutoff_family(
    fock: &FockSpace,
    v_profile: &dyn Fn(usize) -> c64,
    cutoffs: &[usize],
    s: Option<&CMat>,
    s_exponent: f64,
    lambda_circ: Option<f64>,
) -> Result<CutoffFamily<OperatorModel>> {
    let k = fock.modes();
    if let Some(&bad) = cutoffs.iter().find(|&&n| n == 0 || n > k) {
        return Err(Error::Domain(alloc::format!("cutoff {bad} outside [1, {k}]")));
    }
    let model = OperatorModel::new(&fock.dgamma())?;
    let d = model.dim();
    let s = s.cloned().unwrap_or_else(|| CMat::zeros(d, d));
    let truncated = |n: usize| -> Vec<c64> { (0..k).map(|j| if j < n { v_profile(j) } else { real(0.0) }).collect() };
    let limit_a = fock.annihilation(&truncated(k))?;
    let corr = CorrectionS::new(&model, s.clone())?;
    let lc = match lambda_circ {
        Some(l) => l,
        None => {
            let pert = Perturbation::new(&model, limit_a.clone(), s_exponent)?;
            crate::singular::default_lambda_circ(&model, &pert, &corr)
        }
    };
    let r = model.resolvent(real(lc))?;
    let s_h = corr.s().clone();
    let levels = cutoffs
        .iter()
        .map(|&n| {
            let a_n = fock.annihilation(&truncated(n))?;
            let g_n = r.mul(&OpAlgebra::adjoint(&a_n));
            let omg = g_n.one_minus();
            let t_n = OpAlgebra::adjoint(&omg).mul(&s_h).mul(&omg);
            let e_n = a_n.mul(&g_n).add(&t_n);
            Ok(CutoffLevel { n, a_n, e_n })
        })
        .collect::<Result<Vec<_>>>()?;
    CutoffFamily::new(model, levels, None, limit_a, s_h, s_exponent, Some(lc))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_counts_multi_indices() {
        assert_eq!(fock_build(&[1.0], 2).unwrap().dim(), 3);
        assert_eq!(fock_build(&[1.0, 2.0], 3).unwrap().dim(), 10);
        assert_eq!(fock_build(&[1.0, 2.0, 3.0], 12).unwrap().dim(), 455);
    }

    #[test]
    fn graded_order_starts_at_vacuum() {
        let f = fock_build(&[1.0, 1.0], 2).unwrap();
        let expected: [&[u32]; 6] = [&[0, 0], &[0, 1], &[1, 0], &[0, 2], &[1, 1], &[2, 0]];
        for (b, e) in f.basis().iter().zip(expected) {
            assert_eq!(b.as_slice(), e);
        }
    }

    #[test]
    fn single_mode_ladder() {
        let f = fock_build(&[1.0], 2).unwrap();
        let a = f.annihilation(&[real(1.0)]).unwrap();
        assert_eq!(a[(0, 1)], real(1.0));
        assert!((a[(1, 2)].re - libm::sqrt(2.0)).abs() < 1e-15);
        assert_eq!(a[(1, 0)], real(0.0));
    }

    #[test]
    fn ccr_on_interior() {
        let f = fock_build(&[1.0, 2.5], 4).unwrap();
        let v = [c64::new(0.3, -0.2), c64::new(1.1, 0.4)];
        let w = [c64::new(-0.7, 0.5), c64::new(0.2, 0.9)];
        assert!(f.ccr_defect(&v, &w).unwrap() < 1e-14);
    }

    #[test]
    fn vacuum_is_ground_of_dgamma() {
        let f = fock_build(&[0.5, 2.0], 3).unwrap();
        let d = f.dgamma_diag();
        assert_eq!(d[0], 0.0);
        assert!(d.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn van_hove_single_mode() {
        let f = fock_build(&[2.0], 12).unwrap();
        let vh = van_hove_model(&f, &[real(1.0)], 0.5).unwrap();
        assert_eq!(vh.exact_energy, -0.5);
        assert!((vh.truncated_ground_energy().unwrap() + 0.5).abs() < 1e-6);
    }
}
