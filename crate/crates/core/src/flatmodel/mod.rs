//! Flat model Lie (super)algebras `V ⊕ S ⊕ 𝔰𝔬(V)` and the generic graded
//! algebra carrier with its Jacobi oracle.

pub mod model;
pub mod squaring;
pub mod superalgebra;

pub use model::{restricted_kappa_rank, FlatModel, FlatModelRecord, Layout};
pub use squaring::{
    build_squaring_map, candidate_forms, check_causal, find_squaring_map, CausalReport, Parity,
    SquaringMap,
};
pub use superalgebra::{JacobiViolation, SuperAlgebra};

use thiserror::Error;

use crate::clifford::CliffordError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlatModelError {
    #[error("squaring map is not equivariant (so basis {so_index}, component {component})")]
    NotEquivariant { so_index: usize, component: usize },
    #[error("squaring map does not have the declared symmetry")]
    WrongParity,
    #[error("no equivariant squaring map of the requested parity was found")]
    NoSquaringMap,
    #[error("Jacobi identity fails on basis triple {0:?}")]
    Jacobi((usize, usize, usize)),
    #[error("malformed algebra: {0}")]
    Structure(String),
    #[error(transparent)]
    Clifford(#[from] CliffordError),
}
