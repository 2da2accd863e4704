//! Graded subalgebras of a flat model, sections of the squaring map,
//! admissible cocycles and their integration into filtered deformations.
//!
//! Everything is computed in ambient coordinates (`V`, `S`, `𝔰𝔬(V)`) and
//! converted to the sub-basis `V ⊕ S′ ⊕ 𝔥` only when bracket tensors are
//! assembled, with a membership check at every conversion.

pub mod admissible;
pub mod dirac;
pub mod envelope;
pub mod equations;
pub mod integrate;
pub mod subalgebra;

pub use admissible::{admissibility_check, clifford_cocycle, lambda_from_alpha, AdmissibleData, LambdaMap};
pub use dirac::{dirac_kernel, squaring_section, DiracKernel, PairBasis, Section};
pub use envelope::{envelope, h_max, invariant_cocycles, is_commutator_closed, lie_pair_check};
pub use equations::{
    check_full_cocycle, check_theta_system, EquationReport, EquationResidual, GeneralPresentation,
};
pub use integrate::{
    deformation_invariance_checks, integrate, integrate_with_lambda, verify, FilteredDeformation,
    IntegrationReport, InvarianceReport, Provenance, SubalgebraRecord, ThetaTable,
};
pub use subalgebra::{homogeneity_check, stabilizer, Closure, GradedSubalgebra};

use serde::Serialize;
use thiserror::Error;

use crate::clifford::CliffordError;
use crate::exactla::LinalgError;
use crate::flatmodel::FlatModelError;
use crate::spencer::SpencerError;

/// Why an admissible cocycle could not be produced or integrated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ObstructionKind {
    /// `β̂ + γ̂` is not invariant under `𝔥`.
    NotInvariant,
    /// `γ̂(𝔇) ⊄ 𝔥`.
    DiracKernelImageOutsideH,
    /// `ι_v β̂ + γ̂(Σ(v))` does not preserve `S′`.
    SectionCondition,
    /// `Θ(V ⊗ 𝔇) ≠ 0`.
    DiracKernelNotAnnihilated,
    /// The factored map `θ̃` is not alternating.
    ThetaNotAlternating,
    /// `θ̃(v,w)·s` disagrees with the quadratic expression in `β̂` and `λ`.
    ThetaActionMismatch,
}

/// A failed condition with the basis indices where it fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Obstruction {
    pub kind: ObstructionKind,
    pub witness: Vec<usize>,
    pub detail: String,
}

#[derive(Debug, Error)]
pub enum DeformError {
    #[error("subalgebra is not closed ({closure:?}) at basis indices {witness:?}")]
    NotClosed { closure: Closure, witness: (usize, usize) },
    #[error("S′ has dimension {s_dim}, not more than half of {s_total}")]
    NotHighlySupersymmetric { s_dim: usize, s_total: usize },
    #[error("V′ must be all of V")]
    VPrimeNotFull,
    #[error("κ restricted to S′ has rank {rank}, not {vdim}")]
    NotSurjective { rank: usize, vdim: usize },
    #[error("obstruction {0:?}")]
    Obstructed(Obstruction),
    #[error("{what} leaves its target subspace at basis indices {witness:?}")]
    Membership { what: &'static str, witness: Vec<usize> },
    #[error("deformed brackets fail the Jacobi identity on {count} triples, first {first:?}")]
    JacobiOracleFailure { count: usize, first: (usize, usize, usize) },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Spencer(#[from] SpencerError),
    #[error(transparent)]
    Clifford(#[from] CliffordError),
    #[error(transparent)]
    FlatModel(#[from] FlatModelError),
}

impl DeformError {
    pub fn obstruction(&self) -> Option<&Obstruction> {
        match self {
            DeformError::Obstructed(o) => Some(o),
            _ => None,
        }
    }

    fn obstructed(kind: ObstructionKind, witness: Vec<usize>, detail: impl Into<String>) -> Self {
        DeformError::Obstructed(Obstruction { kind, witness, detail: detail.into() })
    }
}
