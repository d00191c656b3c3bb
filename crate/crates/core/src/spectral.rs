//! Free Hamiltonians, their functional calculus and the scale of spaces `𝔥_s`.

use alloc::vec::Vec;
use core::fmt::Debug;

use faer::{c64, Mat};

use crate::algebra::{dense_eigh, spectral_compose, CMat, OpAlgebra};
use crate::error::{Error, Result};
use crate::lowrank::DiagLowRank;
use crate::math::{cabs, cinv, powf, real};

/// Relative width of the exclusion zone around the spectrum: `z` is rejected
/// when `min_k |z − λ_k| < SPECTRUM_GUARD · (1 + ‖H‖)`.
pub const SPECTRUM_GUARD: f64 = 1e-8;

/// A self-adjoint operator with known spectral decomposition, playing the
/// free Hamiltonian. `Op` is the operator representation it produces.
pub trait FreeHamiltonian: Clone + Debug {
    type Op: OpAlgebra;

    fn dim(&self) -> usize;

    /// Eigenvalues in ascending order.
    fn eigvals(&self) -> &[f64];

    /// `f(H)`.
    fn func(&self, f: &dyn Fn(f64) -> c64) -> Self::Op;

    /// Embeds a dense matrix into this model's representation.
    fn embed(&self, m: &CMat) -> Self::Op;

    /// `‖X ψ_k‖` for the eigenvectors `ψ_k`, in the order of [`Self::eigvals`].
    fn eigen_column_norms(&self, x: &Self::Op) -> Vec<f64>;

    fn h_op(&self) -> Self::Op {
        self.func(&|x| real(x))
    }

    fn lambda_inf(&self) -> f64 {
        self.eigvals().first().copied().unwrap_or(0.0)
    }

    fn h_norm(&self) -> f64 {
        self.eigvals().iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Distance from `z` to the spectrum.
    fn spectral_distance(&self, z: c64) -> f64 {
        self.eigvals()
            .iter()
            .map(|&x| cabs(z - real(x)))
            .fold(f64::INFINITY, f64::min)
    }

    fn check_admissible(&self, z: c64) -> Result<()> {
        let guard = SPECTRUM_GUARD * (1.0 + self.h_norm());
        let distance = self.spectral_distance(z);
        if distance < guard || !z.re.is_finite() || !z.im.is_finite() {
            Err(Error::SpectrumHit { re: z.re, im: z.im, distance, guard })
        } else {
            Ok(())
        }
    }

    /// `R_z = (−H + z)⁻¹`.
    fn resolvent(&self, z: c64) -> Result<Self::Op> {
        self.check_admissible(z)?;
        Ok(self.func(&|x| cinv(z - real(x))))
    }

    /// `W(s) = (H² + 1)^{s/2}`, `|s| ≤ 1`.
    fn scale_weight(&self, s: f64) -> Result<ScaleWeight<Self::Op>> {
        if !(s.abs() <= 1.0) {
            return Err(Error::Domain(alloc::format!("scale exponent {s} outside [-1, 1]")));
        }
        let w = if s == 0.0 {
            Self::Op::identity(self.dim())
        } else {
            self.func(&|x| real(powf(x * x + 1.0, s / 2.0)))
        };
        Ok(ScaleWeight { s, w })
    }
}

/// `(H² + 1)^{s/2}`, the weight defining `⟨ψ₁, ψ₂⟩_s`.
#[derive(Debug, Clone)]
pub struct ScaleWeight<M> {
    pub s: f64,
    pub w: M,
}

/// Dense Hermitian free Hamiltonian with cached eigendecomposition.
#[derive(Debug, Clone)]
pub struct OperatorModel {
    h: CMat,
    eigvals: Vec<f64>,
    eigvecs: CMat,
}

impl OperatorModel {
    /// Hermitizes `h ← (h + h†)/2` and diagonalizes it.
    pub fn new(h: &CMat) -> Result<Self> {
        if h.nrows() != h.ncols() {
            return Err(Error::DimensionMismatch { expected: h.nrows(), got: h.ncols() });
        }
        if h.nrows() == 0 {
            return Err(Error::Domain("empty operator".into()));
        }
        let h = hermitize(h);
        let (eigvals, eigvecs) = dense_eigh(&h)?;
        Ok(Self { h, eigvals, eigvecs })
    }

    pub fn from_diagonal(vals: &[f64]) -> Result<Self> {
        let n = vals.len();
        Self::new(&Mat::from_fn(n, n, |i, j| if i == j { real(vals[i]) } else { real(0.0) }))
    }

    pub fn h(&self) -> &CMat {
        &self.h
    }

    pub fn eigvecs(&self) -> &CMat {
        &self.eigvecs
    }

    /// `‖V Λ V† − H‖₂ / ‖H‖₂`.
    pub fn reconstruction_error(&self) -> f64 {
        let vals: Vec<c64> = self.eigvals.iter().map(|&x| real(x)).collect();
        let rec = spectral_compose(&self.eigvecs, &vals);
        let scale = self.h_norm().max(f64::MIN_POSITIVE);
        (&rec - &self.h).norm2() / scale
    }
}

impl FreeHamiltonian for OperatorModel {
    type Op = CMat;

    fn dim(&self) -> usize {
        self.h.nrows()
    }

    fn eigvals(&self) -> &[f64] {
        &self.eigvals
    }

    fn func(&self, f: &dyn Fn(f64) -> c64) -> CMat {
        let fv: Vec<c64> = self.eigvals.iter().map(|&x| f(x)).collect();
        spectral_compose(&self.eigvecs, &fv)
    }

    fn embed(&self, m: &CMat) -> CMat {
        m.clone()
    }

    fn eigen_column_norms(&self, x: &CMat) -> Vec<f64> {
        let xv = x * &self.eigvecs;
        (0..xv.ncols()).map(|k| xv.col(k).norm_l2()).collect()
    }

    fn h_op(&self) -> CMat {
        self.h.clone()
    }
}

/// Free Hamiltonian that is diagonal in the working basis. Produces
/// [`DiagLowRank`] operators, so functional calculus is `O(n)`.
#[derive(Debug, Clone)]
pub struct DiagonalModel {
    energies: Vec<f64>,
    sorted: Vec<f64>,
    order: Vec<usize>,
}

impl DiagonalModel {
    pub fn new(energies: Vec<f64>) -> Result<Self> {
        if energies.is_empty() {
            return Err(Error::Domain("empty operator".into()));
        }
        if energies.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("non-finite energy".into()));
        }
        let mut order: Vec<usize> = (0..energies.len()).collect();
        order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]));
        let sorted = order.iter().map(|&k| energies[k]).collect();
        Ok(Self { energies, sorted, order })
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn to_dense(&self) -> Result<OperatorModel> {
        OperatorModel::from_diagonal(&self.energies)
    }
}

impl FreeHamiltonian for DiagonalModel {
    type Op = DiagLowRank;

    fn dim(&self) -> usize {
        self.energies.len()
    }

    fn eigvals(&self) -> &[f64] {
        &self.sorted
    }

    fn func(&self, f: &dyn Fn(f64) -> c64) -> DiagLowRank {
        DiagLowRank::from_diagonal(self.energies.iter().map(|&x| f(x)).collect())
    }

    fn embed(&self, m: &CMat) -> DiagLowRank {
        DiagLowRank::from_dense(m)
    }

    fn eigen_column_norms(&self, x: &DiagLowRank) -> Vec<f64> {
        let norms = x.column_norms();
        self.order.iter().map(|&k| norms[k]).collect()
    }
}

/// `(h + h†)/2`, exactly Hermitian.
pub fn hermitize(h: &CMat) -> CMat {
    let n = h.nrows();
    Mat::from_fn(n, n, |i, j| {
        if i == j {
            real(h[(i, i)].re)
        } else if i < j {
            (h[(i, j)] + h[(j, i)].conj()) * 0.5
        } else {
            ((h[(j, i)] + h[(i, j)].conj()) * 0.5).conj()
        }
    })
}

/// `‖W(s_to) · L · W(s_from)⁻¹‖₂`, the norm of `L : 𝔥_{s_from} → 𝔥_{s_to}`.
pub fn op_norm_scale<F: FreeHamiltonian>(
    model: &F,
    l: &F::Op,
    s_from: f64,
    s_to: f64,
) -> Result<f64> {
    let w_to = model.scale_weight(s_to)?;
    let w_from_inv = model.scale_weight(-s_from)?;
    Ok(w_to.w.mul(l).mul(&w_from_inv.w).norm2())
}

/// `‖R(z) − R(w) − (w − z) R(z) R(w)‖₂`; vanishes for a pseudo-resolvent.
pub fn pseudo_resolvent_defect<M, F>(rmap: F, z: c64, w: c64) -> Result<f64>
where
    M: OpAlgebra,
    F: Fn(c64) -> Result<M>,
{
    if z == w {
        rmap(z)?;
        return Ok(0.0);
    }
    let rz = rmap(z)?;
    let rw = rmap(w)?;
    Ok(rz.sub(&rw).sub(&rz.mul(&rw).scale(w - z)).norm2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rel_diff;

    fn diag(vals: &[f64]) -> OperatorModel {
        OperatorModel::from_diagonal(vals).unwrap()
    }

    #[test]
    fn resolvent_of_diagonal() {
        let r = diag(&[1.0, 2.0]).resolvent(real(0.0)).unwrap();
        assert!((r[(0, 0)].re + 1.0).abs() < 1e-15);
        assert!((r[(1, 1)].re + 0.5).abs() < 1e-15);
        assert_eq!(r[(0, 1)], real(0.0));
    }

    #[test]
    fn resolvent_one_by_one_at_i() {
        let r = diag(&[0.0]).resolvent(c64::new(0.0, 1.0)).unwrap();
        assert!((r[(0, 0)] - c64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn spectrum_hit_is_rejected() {
        let m = diag(&[1.0, 2.0]);
        assert!(matches!(m.resolvent(real(2.0)), Err(Error::SpectrumHit { .. })));
        assert!(matches!(m.resolvent(real(2.0 + 1e-9)), Err(Error::SpectrumHit { .. })));
        assert!(m.resolvent(real(2.0 + 1e-6)).is_ok());
    }

    #[test]
    fn scale_weight_examples() {
        let m = diag(&[3.0, -1.0, 0.5]);
        let w0 = m.scale_weight(0.0).unwrap();
        assert_eq!(w0.w, crate::algebra::eye(3));
        let w = diag(&[1.0]).scale_weight(1.0).unwrap();
        assert!((w.w[(0, 0)].re - libm::sqrt(2.0)).abs() < 1e-15);
        let w = diag(&[0.0, 2.0]).scale_weight(0.5).unwrap();
        assert!((w.w[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!((w.w[(1, 1)].re - libm::pow(5.0, 0.25)).abs() < 1e-15);
        assert!(matches!(m.scale_weight(1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn op_norm_scale_examples() {
        let m = diag(&[0.0]);
        let two = crate::algebra::eye(1).scale(real(2.0));
        assert!((op_norm_scale(&m, &two, 1.0, 0.0).unwrap() - 2.0).abs() < 1e-15);
        let m = diag(&[1.0, 4.0]);
        assert!((op_norm_scale(&m, &crate::algebra::eye(2), 0.0, 0.0).unwrap() - 1.0).abs() < 1e-14);
        assert!(op_norm_scale(&m, &crate::algebra::eye(2), 0.0, -1.2).is_err());
    }

    #[test]
    fn diagonal_model_agrees_with_dense() {
        let energies = [2.0, 0.5, 7.0, 3.0];
        let d = DiagonalModel::new(energies.to_vec()).unwrap();
        let dense = d.to_dense().unwrap();
        let z = c64::new(1.0, 0.7);
        let a = d.resolvent(z).unwrap().to_dense();
        let b = dense.resolvent(z).unwrap();
        assert!(rel_diff(&a, &b) < 1e-14);
        assert_eq!(d.lambda_inf(), 0.5);
        assert!(dense.reconstruction_error() < 1e-14);
    }

    #[test]
    fn pseudo_resolvent_equal_points() {
        let m = diag(&[1.0, 5.0]);
        let rmap = |z| m.resolvent(z);
        assert_eq!(pseudo_resolvent_defect(rmap, c64::new(0.0, 1.0), c64::new(0.0, 1.0)).unwrap(), 0.0);
        let d = pseudo_resolvent_defect(rmap, c64::new(0.0, 1.0), c64::new(0.0, 2.0)).unwrap();
        assert!(d < 1e-15);
    }
}
