//! Exact rational linear algebra.
//!
//! Rank and kernel computations split a matrix into connected column blocks,
//! run elimination modulo several word-size primes, lift the result back to
//! the rationals and verify it exactly. Small blocks go straight to exact
//! Gauss-Jordan elimination.

pub mod elim;
pub mod modular;
pub mod rational;
pub mod sparse;
pub mod subspace;
pub mod tensor;

pub use elim::{common_annihilated, kernel_basis, kernel_basis_with, rank, rank_with, rank_exact, solve, ElimOptions};
pub use rational::{q, Rational};
pub use sparse::{SparseMatrix, SparseVec};
pub use subspace::Subspace;
pub use tensor::RationalTensor;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("right-hand side is not in the image of the matrix")]
    NoSolution,
}
