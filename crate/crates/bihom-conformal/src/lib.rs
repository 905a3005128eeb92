//! Exact symbolic computation with finite-rank BiHom-Lie conformal
//! algebras over ℚ: concrete algebra/module data on a free ℚ[∂]-basis,
//! full axiom checking as exact polynomial identities, the cochain
//! complex with its differential, one-parameter deformations and
//! Nijenhuis operators, and degree-truncated solvers for every flavor of
//! derivation (plain, generalized, quasi, centroid, quasicentroid,
//! central).
//!
//! Everything is exact: coefficients are arbitrary-precision rationals
//! and every check is a polynomial identity, so there are no tolerances
//! anywhere. See the crate examples for a tour, one per capability, and
//! the `bihom-conformal` binary for the file-driven command interface.

pub mod algebra;
pub mod cli;
pub mod cohomology;
pub mod constructions;
pub mod deformation;
pub mod derivations;
pub mod linalg;
pub mod poly;
pub mod samples;

pub use algebra::{
    AlgebraElement, BiHomLieAlgebra, CheckReport, ConformalAlgebra, ConformalModule, EndoMatrix,
    Failure, LambdaVector,
};
pub use poly::{Poly, Scalar, VarId};

/// Errors for operations with genuine preconditions. Axiom violations are
/// not errors — they are reported as [`CheckReport`] data.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("matrix not invertible over Q[del]: determinant {det} is not a nonzero constant")]
    NotInvertible { det: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
}
