//! Spencer cohomology of flat models and their graded subalgebras.

pub mod cohomology;
pub mod complex;
pub mod normalized;

pub use cohomology::{CohomologyResult, SpencerComplex};
pub use complex::{differential, evaluate, CochainSpace, Host};
pub use normalized::{
    act_on_beta, act_on_gamma, ad_matrix, invariants_under, normalized_cocycle_basis,
    restriction_and_kernel, NormalizedCocycle, NormalizedSystem, Restriction,
};

use thiserror::Error;

use crate::clifford::CliffordError;
use crate::exactla::LinalgError;

#[derive(Debug, Error)]
pub enum SpencerError {
    #[error("β does not extend to a normalized cocycle")]
    NotCocycle,
    #[error("an element invariant on β has a non-invariant γ")]
    GammaNotInvariant,
    #[error("a cocycle vanishing on V⊗S′ has nonzero γ on ⊙²S′")]
    RestrictionMismatch,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Clifford(#[from] CliffordError),
}
