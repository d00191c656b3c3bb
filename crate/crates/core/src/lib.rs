//! Kreĭn-type resolvent formulas for singular Hamiltonians `H + A* + A` on
//! finite-dimensional truncations.
//!
//! The crate is split along the lines of the construction:
//!
//! - [`spectral`] and [`block`]: Hermitian functional calculus, resolvents,
//!   scale-space norms and 2×2 block operators with Schur-complement inversion.
//! - [`singular`]: the `G_z`, `𝔾_z`, `M_z`, `T_S`, `Θ_S` pipeline, the Kreĭn
//!   resolvent and its regularized (cutoff) counterpart.
//! - [`models`]: Friedrichs-type and truncated Fock-space cutoff families, the
//!   van Hove oracle and the Nelson counterterm integral.
//! - [`convergence`]: norm-resolvent distances, smallness checks and rate fits.
//!
//! Every operator is generic over [`OpAlgebra`], with a dense backend
//! (`faer::Mat<c64>`) and an exact diagonal-plus-low-rank backend
//! ([`DiagLowRank`]) for large diagonal models with finite-rank couplings.
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is off.

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod algebra;
pub mod block;
pub mod convergence;
mod error;
pub mod lowrank;
pub mod math;
pub mod models;
pub mod quadrature;
pub mod singular;
pub mod spectral;

pub use algebra::{CMat, OpAlgebra};
pub use block::{schur_invert, BlockOp2, BlockRow};
pub use error::{Error, Result};
pub use faer::c64;
pub use lowrank::DiagLowRank;
pub use spectral::{DiagonalModel, FreeHamiltonian, OperatorModel, ScaleWeight};
