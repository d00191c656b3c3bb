//! Operator algebra shared by the dense and the structured backends.

use alloc::vec::Vec;
use core::fmt::Debug;

use faer::linalg::solvers::DenseSolveCore;
use faer::{c64, Mat, Side};

use crate::error::{Error, Result};
use crate::math::{cabs, real};

/// Dense complex matrix.
pub type CMat = Mat<c64>;

/// The operations the resolvent pipeline needs from a square operator
/// representation on a fixed finite-dimensional space.
pub trait OpAlgebra: Clone + Debug {
    fn dim(&self) -> usize;
    fn identity(n: usize) -> Self;
    fn zeros(n: usize) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn scale(&self, c: c64) -> Self;
    /// `self + c·1`.
    fn shift(&self, c: c64) -> Self;
    fn adjoint(&self) -> Self;
    /// Inverse together with a condition-number estimate, or `None` when the
    /// operator is numerically singular for this backend.
    fn inverse_cond(&self) -> Option<(Self, f64)>;
    /// Spectral norm.
    fn norm2(&self) -> f64;
    /// Largest entry modulus; used for cheap relative scales.
    fn max_abs(&self) -> f64;
    fn to_dense(&self) -> CMat;
    /// Converts a dense matrix into this representation.
    fn from_dense(m: &CMat) -> Self;
    /// `f(X)` for a Hermitian `X`, via its spectral decomposition.
    fn hermitian_fn(&self, f: &dyn Fn(f64) -> f64) -> Result<Self>;

    /// `(X + X†)/2`.
    fn hermitian_part(&self) -> Self {
        self.add(&self.adjoint()).scale(real(0.5))
    }

    /// `1 - self`.
    fn one_minus(&self) -> Self {
        self.scale(real(-1.0)).shift(real(1.0))
    }
}

/// `n × n` identity.
pub fn eye(n: usize) -> CMat {
    Mat::identity(n, n)
}

/// `n × n` zero matrix.
pub fn zero_mat(n: usize) -> CMat {
    Mat::zeros(n, n)
}

/// `‖a − b‖₂`.
pub fn diff_norm<M: OpAlgebra>(a: &M, b: &M) -> f64 {
    a.sub(b).norm2()
}

/// `‖a − b‖₂ / ‖b‖₂`, falling back to the absolute difference when `b = 0`.
pub fn rel_diff<M: OpAlgebra>(a: &M, b: &M) -> f64 {
    let d = diff_norm(a, b);
    let s = b.norm2();
    if s > 0.0 {
        d / s
    } else {
        d
    }
}

/// Hermiticity defect `‖X − X†‖₂ / max(‖X‖₂, 1)`.
pub fn hermiticity_defect<M: OpAlgebra>(x: &M) -> f64 {
    diff_norm(x, &x.adjoint()) / x.norm2().max(1.0)
}

pub(crate) fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

fn norm1(m: &CMat) -> f64 {
    (0..m.ncols())
        .map(|j| (0..m.nrows()).map(|i| cabs(m[(i, j)])).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Dense inverse via partial-pivoting LU with a 1-norm condition estimate.
pub fn dense_inverse_cond(m: &CMat) -> Option<(CMat, f64)> {
    if m.nrows() == 0 {
        return Some((m.clone(), 1.0));
    }
    let inv = m.partial_piv_lu().inverse();
    if !(0..inv.ncols()).all(|j| (0..inv.nrows()).all(|i| inv[(i, j)].re.is_finite() && inv[(i, j)].im.is_finite())) {
        return None;
    }
    let cond = norm1(m) * norm1(&inv);
    if cond.is_finite() {
        Some((inv, cond))
    } else {
        None
    }
}

/// Ascending eigenvalues and unitary eigenvectors of the Hermitian part of `m`.
pub fn dense_eigh(m: &CMat) -> Result<(Vec<f64>, CMat)> {
    let n = m.nrows();
    let h = Mat::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let evd = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::Domain("eigendecomposition did not converge".into()))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[a].re.total_cmp(&s[b].re));
    let vals = order.iter().map(|&k| s[k].re).collect();
    let vecs = Mat::from_fn(n, n, |i, j| u[(i, order[j])]);
    Ok((vals, vecs))
}

/// `V · diag(f) · V†`, made exactly Hermitian when `f` is real.
pub fn spectral_compose(vecs: &CMat, f: &[c64]) -> CMat {
    let n = vecs.nrows();
    let scaled = Mat::from_fn(n, n, |i, k| vecs[(i, k)] * f[k]);
    let out = &scaled * vecs.adjoint();
    if f.iter().all(|x| x.im == 0.0) {
        Mat::from_fn(n, n, |i, j| {
            if i == j {
                real(out[(i, i)].re)
            } else if i < j {
                (out[(i, j)] + out[(j, i)].conj()) * 0.5
            } else {
                (out[(j, i)] + out[(i, j)].conj()).conj() * 0.5
            }
        })
    } else {
        out
    }
}

impl OpAlgebra for CMat {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn identity(n: usize) -> Self {
        Mat::identity(n, n)
    }

    fn zeros(n: usize) -> Self {
        Mat::zeros(n, n)
    }

    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn scale(&self, c: c64) -> Self {
        Mat::from_fn(self.nrows(), self.ncols(), |i, j| self[(i, j)] * c)
    }

    fn shift(&self, c: c64) -> Self {
        let mut out = self.clone();
        for i in 0..self.nrows().min(self.ncols()) {
            out[(i, i)] += c;
        }
        out
    }

    fn adjoint(&self) -> Self {
        self.as_ref().adjoint().to_owned()
    }

    fn inverse_cond(&self) -> Option<(Self, f64)> {
        dense_inverse_cond(self)
    }

    fn norm2(&self) -> f64 {
        if self.nrows() == 0 || self.ncols() == 0 {
            return 0.0;
        }
        match self.singular_values() {
            Ok(s) => s.into_iter().fold(0.0, f64::max),
            Err(_) => f64::NAN,
        }
    }

    fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for j in 0..self.ncols() {
            for i in 0..self.nrows() {
                m = m.max(cabs(self[(i, j)]));
            }
        }
        m
    }

    fn to_dense(&self) -> CMat {
        self.clone()
    }

    fn from_dense(m: &CMat) -> Self {
        m.clone()
    }

    fn hermitian_fn(&self, f: &dyn Fn(f64) -> f64) -> Result<Self> {
        let (vals, vecs) = dense_eigh(self)?;
        let fv: Vec<c64> = vals.iter().map(|&x| real(f(x))).collect();
        Ok(spectral_compose(&vecs, &fv))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_basics() {
        let a = Mat::from_fn(3, 3, |i, j| c64::new((i + 2 * j) as f64, i as f64 - j as f64));
        let id = crate::algebra::eye(3);
        assert_eq!(a.mul(&id), a);
        assert!(rel_diff(&a.adjoint().adjoint().to_owned(), &a) == 0.0);
        assert!((id.norm2() - 1.0).abs() < 1e-14);
        let shifted = a.shift(real(2.0)).sub(&a);
        assert!(rel_diff(&shifted, &id.scale(real(2.0))) < 1e-15);
    }

    #[test]
    fn inverse_and_condition() {
        let m = Mat::from_fn(2, 2, |i, j| real(if i == j { 2.0 } else { 0.0 }));
        let (inv, cond) = m.inverse_cond().unwrap();
        assert!((inv[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((cond - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hermitian_fn_of_diagonal() {
        let m = Mat::from_fn(2, 2, |i, j| real(if i == j { (i + 1) as f64 } else { 0.0 }));
        let sq = m.hermitian_fn(&|x| x * x).unwrap();
        assert!((sq[(1, 1)].re - 4.0).abs() < 1e-13);
        assert_eq!(sq[(0, 1)], sq[(1, 0)].conj());
    }
}
