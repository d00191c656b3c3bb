//! Exact arithmetic on operators of the form `D + U K V†`.
//!
//! `D` is diagonal and `U`, `V` are tall `n × r` factors. Sums and products
//! stay in the class with rank growing additively; inverses use the
//! Woodbury identity. After every operation the low-rank part is recompressed
//! to orthonormal factors with a diagonal core, dropping only singular values
//! below `COMPRESS_RTOL` relative to the largest one.
//!
//! This is what makes diagonal free Hamiltonians with finite-rank couplings
//! tractable at dimensions where dense `O(n³)` work is not.

use alloc::vec;
use alloc::vec::Vec;

use faer::{c64, Mat};

use crate::algebra::{dense_inverse_cond, CMat, OpAlgebra};
use crate::error::{Error, Result};
use crate::math::{cabs, cinv, real, sqrt};

const COMPRESS_RTOL: f64 = 1e-15;
const POWER_MAX_ITER: usize = 2000;
const POWER_RTOL: f64 = 1e-15;
const WOODBURY_MAX_COND: f64 = 1e14;

#[derive(Debug, Clone, PartialEq)]
pub struct DiagLowRank {
    diag: Vec<c64>,
    u: CMat,
    k: CMat,
    v: CMat,
}

impl DiagLowRank {
    pub fn from_diagonal(diag: Vec<c64>) -> Self {
        let n = diag.len();
        Self {
            diag,
            u: Mat::zeros(n, 0),
            k: Mat::zeros(0, 0),
            v: Mat::zeros(n, 0),
        }
    }

    /// `D + U K V†` from raw factors.
    pub fn new(diag: Vec<c64>, u: CMat, k: CMat, v: CMat) -> Result<Self> {
        let n = diag.len();
        let r = k.nrows();
        if u.nrows() != n || v.nrows() != n {
            return Err(Error::DimensionMismatch { expected: n, got: u.nrows().max(v.nrows()) });
        }
        if u.ncols() != r || v.ncols() != k.ncols() {
            return Err(Error::DimensionMismatch { expected: r, got: u.ncols() });
        }
        Ok(Self { diag, u, k, v }.compressed())
    }

    /// `c · x y†`.
    pub fn outer(x: &[c64], y: &[c64], c: c64) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
        }
        let n = x.len();
        let u = Mat::from_fn(n, 1, |i, _| x[i]);
        let v = Mat::from_fn(n, 1, |i, _| y[i]);
        let k = Mat::from_fn(1, 1, |_, _| c);
        Self::new(vec![c64::new(0.0, 0.0); n], u, k, v)
    }

    /// Embeds a dense matrix as a rank-`n` correction to the zero diagonal.
    pub fn from_dense(m: &CMat) -> Self {
        let n = m.nrows();
        Self {
            diag: vec![c64::new(0.0, 0.0); n],
            u: Mat::identity(n, n),
            k: m.clone(),
            v: Mat::identity(n, n),
        }
        .compressed()
    }

    pub fn diagonal(&self) -> &[c64] {
        &self.diag
    }

    pub fn rank(&self) -> usize {
        self.k.nrows()
    }

    pub fn low_rank_norm(&self) -> f64 {
        // Compressed form: orthonormal factors and a diagonal core.
        (0..self.rank()).map(|i| cabs(self.k[(i, i)])).fold(0.0, f64::max)
    }

    /// `X x`.
    pub fn apply(&self, x: &[c64]) -> Vec<c64> {
        let n = self.diag.len();
        let r = self.rank();
        let mut vx = vec![c64::new(0.0, 0.0); r];
        for (j, slot) in vx.iter_mut().enumerate() {
            *slot = (0..n).map(|i| self.v[(i, j)].conj() * x[i]).sum();
        }
        let kvx: Vec<c64> = (0..r).map(|i| (0..r).map(|j| self.k[(i, j)] * vx[j]).sum()).collect();
        (0..n)
            .map(|i| self.diag[i] * x[i] + (0..r).map(|j| self.u[(i, j)] * kvx[j]).sum::<c64>())
            .collect()
    }

    /// `X† x`.
    pub fn apply_adjoint(&self, x: &[c64]) -> Vec<c64> {
        let n = self.diag.len();
        let r = self.rank();
        let ux: Vec<c64> = (0..r)
            .map(|j| (0..n).map(|i| self.u[(i, j)].conj() * x[i]).sum())
            .collect();
        let kux: Vec<c64> = (0..r)
            .map(|i| (0..r).map(|j| self.k[(j, i)].conj() * ux[j]).sum())
            .collect();
        (0..n)
            .map(|i| {
                self.diag[i].conj() * x[i] + (0..r).map(|j| self.v[(i, j)] * kux[j]).sum::<c64>()
            })
            .collect()
    }

    /// `‖X e_k‖` for every standard basis vector `e_k`.
    pub fn column_norms(&self) -> Vec<f64> {
        let n = self.diag.len();
        if self.rank() == 0 {
            return self.diag.iter().map(|d| cabs(*d)).collect();
        }
        let gram = self.u.adjoint() * &self.u;
        // Column k of U K V† is U w_k with w_k = K · (row k of V)†.
        let w = &self.k * self.v.adjoint();
        (0..n)
            .map(|k| {
                let wk = w.col(k);
                let quad = (wk.adjoint() * &gram * wk).re;
                let uwk: c64 = (0..self.rank()).map(|j| self.u[(k, j)] * w[(j, k)]).sum();
                let cross = 2.0 * (self.diag[k].conj() * uwk).re;
                sqrt((self.diag[k].norm_sqr() + quad + cross).max(0.0))
            })
            .collect()
    }

    fn compressed(self) -> Self {
        let n = self.diag.len();
        if self.rank() == 0 {
            return self;
        }
        let qr_u = self.u.qr();
        let qr_v = self.v.qr();
        let qu = qr_u.compute_thin_Q();
        let qv = qr_v.compute_thin_Q();
        let core = qr_u.thin_R() * &self.k * qr_v.thin_R().adjoint();
        let svd = match core.svd() {
            Ok(svd) => svd,
            Err(_) => {
                return Self { diag: self.diag, u: qu, k: core, v: qv };
            }
        };
        let s = svd.S().column_vector();
        let smax = (0..s.nrows()).map(|i| s[i].re).fold(0.0, f64::max);
        let keep: Vec<usize> = (0..s.nrows())
            .filter(|&i| s[i].re > COMPRESS_RTOL * smax && s[i].re > 0.0)
            .collect();
        let r = keep.len();
        let pu = svd.U();
        let pv = svd.V();
        let u = &qu * Mat::from_fn(pu.nrows(), r, |i, j| pu[(i, keep[j])]);
        let v = &qv * Mat::from_fn(pv.nrows(), r, |i, j| pv[(i, keep[j])]);
        let k = Mat::from_fn(r, r, |i, j| if i == j { s[keep[i]] } else { c64::new(0.0, 0.0) });
        debug_assert_eq!(u.nrows(), n);
        Self { diag: self.diag, u, k, v }
    }

    fn scale_rows(d: &[c64], m: &CMat) -> CMat {
        Mat::from_fn(m.nrows(), m.ncols(), |i, j| d[i] * m[(i, j)])
    }

    fn power_norm(&self) -> f64 {
        let n = self.diag.len();
        if n == 0 {
            return 0.0;
        }
        // Start from a vector that overlaps both the diagonal peak and the
        // dominant low-rank direction.
        let imax = (0..n)
            .max_by(|&a, &b| cabs(self.diag[a]).total_cmp(&cabs(self.diag[b])))
            .unwrap_or(0);
        let mut x: Vec<c64> = (0..n)
            .map(|i| {
                let lr = if self.rank() > 0 { self.v[(i, 0)] } else { c64::new(0.0, 0.0) };
                lr + real(1.0 / sqrt(n as f64)) + if i == imax { real(1.0) } else { real(0.0) }
            })
            .collect();
        let mut est = 0.0;
        for _ in 0..POWER_MAX_ITER {
            let nx = sqrt(x.iter().map(|c| c.norm_sqr()).sum());
            if nx == 0.0 {
                return 0.0;
            }
            x.iter_mut().for_each(|c| *c *= 1.0 / nx);
            let y = self.apply(&x);
            let ny = sqrt(y.iter().map(|c| c.norm_sqr()).sum());
            let z = self.apply_adjoint(&y);
            let done = (ny - est).abs() <= POWER_RTOL * ny;
            est = ny;
            if done {
                break;
            }
            x = z;
        }
        est
    }
}

impl OpAlgebra for DiagLowRank {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn identity(n: usize) -> Self {
        Self::from_diagonal(vec![real(1.0); n])
    }

    fn zeros(n: usize) -> Self {
        Self::from_diagonal(vec![real(0.0); n])
    }

    fn add(&self, rhs: &Self) -> Self {
        let (r1, r2) = (self.rank(), rhs.rank());
        let n = self.dim();
        let diag = self.diag.iter().zip(&rhs.diag).map(|(a, b)| a + b).collect();
        let u = Mat::from_fn(n, r1 + r2, |i, j| if j < r1 { self.u[(i, j)] } else { rhs.u[(i, j - r1)] });
        let v = Mat::from_fn(n, r1 + r2, |i, j| if j < r1 { self.v[(i, j)] } else { rhs.v[(i, j - r1)] });
        let k = Mat::from_fn(r1 + r2, r1 + r2, |i, j| match (i < r1, j < r1) {
            (true, true) => self.k[(i, j)],
            (false, false) => rhs.k[(i - r1, j - r1)],
            _ => c64::new(0.0, 0.0),
        });
        Self { diag, u, k, v }.compressed()
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(real(-1.0)))
    }

    fn mul(&self, rhs: &Self) -> Self {
        // (D1 + U1K1V1†)(D2 + U2K2V2†)
        //   = D1D2 + [D1U2, U1] [[K2, 0], [K1V1†U2K2, K1]] [V2, D2†V1]†
        let n = self.dim();
        let (r1, r2) = (self.rank(), rhs.rank());
        let diag = self.diag.iter().zip(&rhs.diag).map(|(a, b)| a * b).collect();
        let d1u2 = Self::scale_rows(&self.diag, &rhs.u);
        let d2c: Vec<c64> = rhs.diag.iter().map(|d| d.conj()).collect();
        let d2v1 = Self::scale_rows(&d2c, &self.v);
        let cross = &self.k * (self.v.adjoint() * &rhs.u) * &rhs.k;
        let u = Mat::from_fn(n, r2 + r1, |i, j| if j < r2 { d1u2[(i, j)] } else { self.u[(i, j - r2)] });
        let v = Mat::from_fn(n, r2 + r1, |i, j| if j < r2 { rhs.v[(i, j)] } else { d2v1[(i, j - r2)] });
        let k = Mat::from_fn(r2 + r1, r2 + r1, |i, j| match (i < r2, j < r2) {
            (true, true) => rhs.k[(i, j)],
            (false, true) => cross[(i - r2, j)],
            (false, false) => self.k[(i - r2, j - r2)],
            (true, false) => c64::new(0.0, 0.0),
        });
        Self { diag, u, k, v }.compressed()
    }

    fn scale(&self, c: c64) -> Self {
        Self {
            diag: self.diag.iter().map(|d| d * c).collect(),
            u: self.u.clone(),
            k: self.k.scale(c),
            v: self.v.clone(),
        }
    }

    fn shift(&self, c: c64) -> Self {
        let mut out = self.clone();
        out.diag.iter_mut().for_each(|d| *d += c);
        out
    }

    fn adjoint(&self) -> Self {
        Self {
            diag: self.diag.iter().map(|d| d.conj()).collect(),
            u: self.v.clone(),
            k: self.k.adjoint().to_owned(),
            v: self.u.clone(),
        }
    }

    fn inverse_cond(&self) -> Option<(Self, f64)> {
        // (D + UKV†)⁻¹ = D⁻¹ − D⁻¹U (1 + K V†D⁻¹U)⁻¹ K V†D⁻¹
        if self.diag.iter().any(|d| cabs(*d) == 0.0 || !d.re.is_finite() || !d.im.is_finite()) {
            return None;
        }
        let dinv: Vec<c64> = self.diag.iter().map(|&d| cinv(d)).collect();
        let dinv_u = Self::scale_rows(&dinv, &self.u);
        let small = (&self.k * (self.v.adjoint() * &dinv_u)).shift(real(1.0));
        let (small_inv, small_cond) = dense_inverse_cond(&small)?;
        if small_cond > WOODBURY_MAX_COND {
            return None;
        }
        let dinv_c: Vec<c64> = dinv.iter().map(|d| d.conj()).collect();
        let inv = Self {
            diag: dinv,
            u: dinv_u,
            k: (small_inv * &self.k).scale(real(-1.0)),
            v: Self::scale_rows(&dinv_c, &self.v),
        }
        .compressed();
        let cond = norm_bound(self) * norm_bound(&inv);
        cond.is_finite().then_some((inv, cond))
    }

    fn norm2(&self) -> f64 {
        if self.diag.iter().all(|d| *d == c64::new(0.0, 0.0)) {
            return self.low_rank_norm();
        }
        if self.rank() == 0 {
            return self.diag.iter().map(|d| cabs(*d)).fold(0.0, f64::max);
        }
        self.power_norm()
    }

    fn max_abs(&self) -> f64 {
        self.diag.iter().map(|d| cabs(*d)).fold(self.low_rank_norm(), f64::max)
    }

    fn to_dense(&self) -> CMat {
        let n = self.dim();
        let mut m = &self.u * &self.k * self.v.adjoint();
        if m.nrows() != n {
            m = Mat::zeros(n, n);
        }
        for i in 0..n {
            m[(i, i)] += self.diag[i];
        }
        m
    }

    fn from_dense(m: &CMat) -> Self {
        DiagLowRank::from_dense(m)
    }

    fn hermitian_fn(&self, f: &dyn Fn(f64) -> f64) -> Result<Self> {
        if self.rank() == 0 {
            return Ok(Self::from_diagonal(self.diag.iter().map(|d| real(f(d.re))).collect()));
        }
        let dense = self.to_dense().hermitian_fn(f)?;
        Ok(Self::from_dense(&dense))
    }
}

/// Upper bound on the spectral norm of a compressed operator.
fn norm_bound(x: &DiagLowRank) -> f64 {
    x.diag.iter().map(|d| cabs(*d)).fold(0.0, f64::max) + x.low_rank_norm()
}
