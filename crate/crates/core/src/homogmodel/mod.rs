//! The homogeneous model of a filtered deformation, evaluated at the basepoint.
//!
//! The even part `𝔤 = V ⊕ 𝔥` of a deformation is a Lie algebra with
//! `𝔤/𝔥 ≅ V`. Invariant connections on `G/H` are encoded by Nomizu maps
//! `𝔤 → 𝔨`; this module computes the Levi-Civita one, Wang curvatures, and
//! the basepoint form of the Killing spinor equation.

pub mod killing;
pub mod nomizu;
pub mod pair;
pub mod spinor;

pub use killing::{center_dim, derived_dim, inertia, killing_form, Inertia, LieCertificate};
pub use nomizu::{
    constant_curvature, first_bianchi_failures, nomizu_levi_civita, wang_curvature, Curvature, NomizuMap,
};
pub use pair::MetricLiePair;
pub use spinor::{
    killing_spinor_check, reconstruct, spinor_connection_flatness, spinor_nomizu_map, FlatnessReport,
    KillingSpinorReport, Reconstruction,
};

use thiserror::Error;

use crate::clifford::CliffordError;
use crate::deform::DeformError;
use crate::exactla::LinalgError;

#[derive(Debug, Error)]
pub enum HomogError {
    #[error("basis element {0} of 𝔤 is odd")]
    OddElement(usize),
    #[error("𝔥 is not a subalgebra: [{0}, {1}] has a component outside 𝔥")]
    NotClosed(usize, usize),
    #[error("η is not invariant under 𝔥 basis element {element} at ({a}, {b})")]
    NotInvariant { element: usize, a: usize, b: usize },
    #[error("η is degenerate at index {0}")]
    Degenerate(usize),
    #[error("the bracket on 𝔤 fails the Jacobi identity on {0} triples")]
    NotLie(usize),
    #[error("Levi-Civita Nomizu map ill-defined: {what} fails at {witness:?}")]
    WellDefinednessFailure { what: &'static str, witness: (usize, usize) },
    #[error("{0}")]
    Shape(String),
    #[error(transparent)]
    Deform(#[from] DeformError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Clifford(#[from] CliffordError),
}
