//! Clifford algebras, real pinor and spinor modules, and the spin action of
//! the orthogonal Lie algebra.

pub mod algebra;
pub mod monomial;
pub mod pinor;
pub mod signature;
pub mod spin;
pub mod spinor;

pub use algebra::CliffordAlgebra;
pub use monomial::{Monomial, Pauli};
pub use pinor::{Chirality, PinorModule, PinorSummary};
pub use signature::{irreducible_module_dim, Convention, Signature};
pub use spin::{omega_of, SoBasis, SpinAction, TwoVector};
pub use spinor::{Extension, SpinorModule};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CliffordError {
    #[error("invalid signature: {0}")]
    InvalidSignature(String),
    #[error("matrix is not skew with respect to the metric")]
    NotSkew,
    #[error("pinor construction failed: {0}")]
    Construction(String),
    #[error("the pinor module has no chirality splitting")]
    NoChirality,
}
