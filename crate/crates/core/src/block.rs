//! 2×2 block operators on `𝔉 ⊕ 𝔉` and their inversion through the second
//! Schur complement.

use faer::{c64, Mat};

use crate::algebra::{check_dims, CMat, OpAlgebra};
use crate::error::{Error, Result};
use crate::math::real;

/// Condition estimate above which an inversion path is rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// `[[a11, a12], [a21, a22]]` acting on `𝔉 ⊕ 𝔉`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOp2<M> {
    pub a11: M,
    pub a12: M,
    pub a21: M,
    pub a22: M,
}

impl<M: OpAlgebra> BlockOp2<M> {
    pub fn new(a11: M, a12: M, a21: M, a22: M) -> Result<Self> {
        let n = a11.dim();
        check_dims(n, a12.dim())?;
        check_dims(n, a21.dim())?;
        check_dims(n, a22.dim())?;
        Ok(Self { a11, a12, a21, a22 })
    }

    pub fn dim(&self) -> usize {
        self.a11.dim()
    }

    pub fn identity(n: usize) -> Self {
        Self { a11: M::identity(n), a12: M::zeros(n), a21: M::zeros(n), a22: M::identity(n) }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self {
            a11: self.a11.add(&rhs.a11),
            a12: self.a12.add(&rhs.a12),
            a21: self.a21.add(&rhs.a21),
            a22: self.a22.add(&rhs.a22),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self {
            a11: self.a11.sub(&rhs.a11),
            a12: self.a12.sub(&rhs.a12),
            a21: self.a21.sub(&rhs.a21),
            a22: self.a22.sub(&rhs.a22),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self {
            a11: self.a11.mul(&rhs.a11).add(&self.a12.mul(&rhs.a21)),
            a12: self.a11.mul(&rhs.a12).add(&self.a12.mul(&rhs.a22)),
            a21: self.a21.mul(&rhs.a11).add(&self.a22.mul(&rhs.a21)),
            a22: self.a21.mul(&rhs.a12).add(&self.a22.mul(&rhs.a22)),
        }
    }

    pub fn scale(&self, c: c64) -> Self {
        Self {
            a11: self.a11.scale(c),
            a12: self.a12.scale(c),
            a21: self.a21.scale(c),
            a22: self.a22.scale(c),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            a11: self.a11.adjoint(),
            a12: self.a21.adjoint(),
            a21: self.a12.adjoint(),
            a22: self.a22.adjoint(),
        }
    }

    pub fn blocks(&self) -> [&M; 4] {
        [&self.a11, &self.a12, &self.a21, &self.a22]
    }

    /// Largest blockwise `‖Δ_ij‖₂`, relative to `max(‖rhs_ij‖₂, 1)`.
    pub fn blockwise_diff(&self, rhs: &Self) -> f64 {
        self.blocks()
            .iter()
            .zip(rhs.blocks())
            .map(|(a, b)| a.sub(b).norm2() / b.norm2().max(1.0))
            .fold(0.0, f64::max)
    }

    /// Largest spectral norm among the blocks.
    pub fn max_block_norm(&self) -> f64 {
        self.blocks().iter().map(|b| b.norm2()).fold(0.0, f64::max)
    }

    /// Deviation from block Hermitian symmetry: `a11 = a11†`, `a22 = a22†`,
    /// `a21 = a12†`.
    pub fn symmetry_defect(&self) -> f64 {
        self.blockwise_diff(&self.adjoint())
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.symmetry_defect() <= tol
    }
}

impl BlockOp2<CMat> {
    /// The `2n × 2n` matrix.
    pub fn assemble(&self) -> CMat {
        let n = self.dim();
        Mat::from_fn(2 * n, 2 * n, |i, j| {
            let b = match (i < n, j < n) {
                (true, true) => &self.a11,
                (true, false) => &self.a12,
                (false, true) => &self.a21,
                (false, false) => &self.a22,
            };
            b[(i % n, j % n)]
        })
    }

    pub fn split(m: &CMat) -> Result<Self> {
        if m.nrows() != m.ncols() || !m.nrows().is_multiple_of(2) {
            return Err(Error::Domain("block split needs an even square matrix".into()));
        }
        let n = m.nrows() / 2;
        let block = |r: usize, c: usize| Mat::from_fn(n, n, |i, j| m[(r * n + i, c * n + j)]);
        Ok(Self { a11: block(0, 0), a12: block(0, 1), a21: block(1, 0), a22: block(1, 1) })
    }
}

/// Block row `[L | R] : 𝔉 ⊕ 𝔉 → 𝔉`, e.g. `𝔾_z = [G_z | R_z]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockRow<M> {
    pub left: M,
    pub right: M,
}

impl<M: OpAlgebra> BlockRow<M> {
    pub fn sub(&self, rhs: &Self) -> Self {
        Self { left: self.left.sub(&rhs.left), right: self.right.sub(&rhs.right) }
    }

    pub fn scale(&self, c: c64) -> Self {
        Self { left: self.left.scale(c), right: self.right.scale(c) }
    }

    /// `self† · rhs`, a block operator `𝔉 ⊕ 𝔉 → 𝔉 ⊕ 𝔉`.
    pub fn adjoint_times(&self, rhs: &Self) -> BlockOp2<M> {
        let (l, r) = (self.left.adjoint(), self.right.adjoint());
        BlockOp2 {
            a11: l.mul(&rhs.left),
            a12: l.mul(&rhs.right),
            a21: r.mul(&rhs.left),
            a22: r.mul(&rhs.right),
        }
    }

    /// `self · B · other†`.
    pub fn sandwich(&self, b: &BlockOp2<M>, other: &Self) -> M {
        let (ol, or) = (other.left.adjoint(), other.right.adjoint());
        let left = self.left.mul(&b.a11).add(&self.right.mul(&b.a21));
        let right = self.left.mul(&b.a12).add(&self.right.mul(&b.a22));
        left.mul(&ol).add(&right.mul(&or))
    }
}

impl BlockRow<CMat> {
    /// `L ψ + R φ`.
    pub fn apply(&self, psi: &CMat, phi: &CMat) -> CMat {
        &self.left * psi + &self.right * phi
    }
}

/// Which path produced a block inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InversionPath {
    Schur,
    Dense,
}

/// Block inverse through the second Schur complement `a11 − a12 a22⁻¹ a21`:
///
/// ```text
/// [[ S⁻¹,            −S⁻¹ a12 a22⁻¹                    ],
///  [ −a22⁻¹ a21 S⁻¹,  a22⁻¹ + a22⁻¹ a21 S⁻¹ a12 a22⁻¹ ]]
/// ```
///
/// Falls back to inverting the assembled `2n × 2n` matrix when `a22` or the
/// complement is ill conditioned.
pub fn schur_invert<M: OpAlgebra>(b: &BlockOp2<M>) -> Result<BlockOp2<M>> {
    schur_invert_with_path(b).map(|(inv, _)| inv)
}

pub fn schur_invert_with_path<M: OpAlgebra>(b: &BlockOp2<M>) -> Result<(BlockOp2<M>, InversionPath)> {
    if let Some(inv) = schur_path(b) {
        return Ok((inv, InversionPath::Schur));
    }
    dense_path(b).map(|inv| (inv, InversionPath::Dense))
}

fn schur_path<M: OpAlgebra>(b: &BlockOp2<M>) -> Option<BlockOp2<M>> {
    let (a22_inv, c22) = b.a22.inverse_cond()?;
    if c22 > MAX_CONDITION {
        return None;
    }
    let x = b.a12.mul(&a22_inv); // a12 a22⁻¹
    let y = a22_inv.mul(&b.a21); // a22⁻¹ a21
    let schur = b.a11.sub(&x.mul(&b.a21));
    let (s_inv, cs) = schur.inverse_cond()?;
    if cs > MAX_CONDITION {
        return None;
    }
    let minus = real(-1.0);
    let a12 = s_inv.mul(&x).scale(minus);
    let a21 = y.mul(&s_inv).scale(minus);
    let a22 = a22_inv.add(&y.mul(&s_inv).mul(&x));
    Some(BlockOp2 { a11: s_inv, a12, a21, a22 })
}

fn dense_path<M: OpAlgebra>(b: &BlockOp2<M>) -> Result<BlockOp2<M>> {
    let dense = BlockOp2 {
        a11: b.a11.to_dense(),
        a12: b.a12.to_dense(),
        a21: b.a21.to_dense(),
        a22: b.a22.to_dense(),
    }
    .assemble();
    let (inv, cond) = crate::algebra::dense_inverse_cond(&dense)
        .ok_or(Error::SingularBlock { condition: f64::INFINITY })?;
    if cond > MAX_CONDITION {
        return Err(Error::SingularBlock { condition: cond });
    }
    let parts = BlockOp2::split(&inv)?;
    Ok(BlockOp2 {
        a11: M::from_dense(&parts.a11),
        a12: M::from_dense(&parts.a12),
        a21: M::from_dense(&parts.a21),
        a22: M::from_dense(&parts.a22),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rel_diff;

    fn pseudo(n: usize, seed: f64) -> CMat {
        Mat::from_fn(n, n, |i, j| {
            let t = seed * (1.0 + i as f64) + 0.37 * j as f64 * seed;
            c64::new(libm::sin(t), libm::cos(2.1 * t + j as f64))
        })
    }

    #[test]
    fn identity_inverts_to_itself() {
        let id = BlockOp2::<CMat>::identity(3);
        let inv = schur_invert(&id).unwrap();
        assert_eq!(inv.blockwise_diff(&id), 0.0);
    }

    #[test]
    fn schur_matches_dense_inverse() {
        let n = 6;
        let b = BlockOp2::new(
            pseudo(n, 0.3).shift(real(4.0)),
            pseudo(n, 0.7),
            pseudo(n, 1.1),
            pseudo(n, 1.9).shift(c64::new(0.0, 5.0)),
        )
        .unwrap();
        let (inv, path) = schur_invert_with_path(&b).unwrap();
        assert_eq!(path, InversionPath::Schur);
        let (oracle, _) = b.assemble().inverse_cond().unwrap();
        assert!(rel_diff(&inv.assemble(), &oracle) < 1e-12);
        let prod = b.mul(&inv).assemble();
        assert!(rel_diff(&prod, &crate::algebra::eye(2 * n)) < 1e-12);
    }

    #[test]
    fn singular_pivot_falls_back_to_dense() {
        let n = 3;
        // [[0, 1], [1, 0]] has a zero a22 but is invertible.
        let b = BlockOp2::new(crate::algebra::zero_mat(n), crate::algebra::eye(n), crate::algebra::eye(n), crate::algebra::zero_mat(n)).unwrap();
        let (inv, path) = schur_invert_with_path(&b).unwrap();
        assert_eq!(path, InversionPath::Dense);
        assert!(rel_diff(&inv.assemble(), &b.assemble()) < 1e-15);
    }

    #[test]
    fn fully_singular_block_is_reported() {
        let n = 2;
        let b = BlockOp2::new(crate::algebra::eye(n), crate::algebra::eye(n), crate::algebra::eye(n), crate::algebra::eye(n)).unwrap();
        assert!(matches!(schur_invert(&b), Err(Error::SingularBlock { .. })));
    }

    #[test]
    fn symmetry_check() {
        let a = pseudo(4, 0.5);
        let h = a.hermitian_part();
        let b = BlockOp2::new(h.clone(), a.clone(), a.adjoint().to_owned(), h).unwrap();
        assert!(b.is_symmetric(1e-15));
        let c = BlockOp2::new(a.clone(), a.clone(), a.adjoint().to_owned(), a).unwrap();
        assert!(!c.is_symmetric(1e-6));
    }
}
