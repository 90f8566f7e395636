//! Left-invariant positive-definite kernels on compact Lie groups.
//!
//! The crate builds kernels `K(x, y) = Σ d_ξ Tr[ξ(x) σ(ξ) ξ(y)*]` from matrix
//! symbols on the circle, the 2-torus and SU(2), realises the associated
//! reproducing kernel Hilbert space through coefficient fields, and evaluates
//! upper and lower bounds on the covering numbers of its embedding into
//! continuous functions, together with empirical covering estimates that
//! stress-test those bounds.
//!
//! Everything here is pure computation: `no_std` with `alloc`. File formats,
//! configuration and the command line live in the `liecover` crate.
//!
//! Module map:
//!
//! | module | contents |
//! |--------|----------|
//! | [`group`] | groups, irreducible labels, points, representations |
//! | [`quadrature`] | Haar grids, Haar sampling, Peter–Weyl orthogonality |
//! | [`symbol`] | matrix symbols, certification, square roots, order fits |
//! | [`kernel`] | kernel synthesis, Gram matrices, invariance checks |
//! | [`rkhs`] | coefficient fields, inner product, the operator `Q` |
//! | [`counting`] | weighted dual counts, Weyl fits, rank bounds, tails |
//! | [`bounds`] | closed-form entropy bounds and their inner optimisations |
//! | [`covering`] | empirical covering/packing estimates and the truncation bracket |
//! | [`oracle`] | exact covering counts for segments and planar ellipses |
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod counting;
pub mod covering;
mod error;
pub mod group;
pub mod kernel;
pub mod linalg;
pub mod optimize;
pub mod oracle;
pub mod quadrature;
pub mod rkhs;
pub mod rng;
pub mod symbol;
mod wigner;

pub use error::{Error, Result};
pub use group::{GroupId, GroupPoint, IrrepIndex, IrrepLabel, Su2};
pub use kernel::TruncatedKernel;
pub use num_complex::Complex64;
pub use quadrature::QuadratureGrid;
pub use rkhs::{RkhsCoefficients, SampledFunction};
pub use symbol::{SymbolDiagnostics, SymbolFamily, SymbolField};
