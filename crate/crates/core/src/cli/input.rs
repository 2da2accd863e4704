//! JSON job inputs for `subalgebra-check` and `deform integrate`.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::clifford::{Convention, Extension, Signature, SpinorModule};
use crate::deform::{clifford_cocycle, h_max, stabilizer, GradedSubalgebra};
use crate::exactla::{Rational, SparseMatrix, SparseVec, Subspace};
use crate::flatmodel::{find_squaring_map, FlatModel, Parity};
use crate::spencer::{normalized_cocycle_basis, NormalizedCocycle, NormalizedSystem};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub signature: (usize, usize),
    pub parity: Parity,
    #[serde(default)]
    pub convention: Convention,
    #[serde(default)]
    pub extension: Option<Extension>,
}

impl ModelSpec {
    pub fn build(&self) -> Result<FlatModel, CliError> {
        let (p, q) = self.signature;
        let sig = Signature::with_convention(p, q, self.convention).map_err(|e| CliError::Invalid(e.to_string()))?;
        build_model(sig, self.parity, self.extension)
    }
}

pub fn build_model(sig: Signature, parity: Parity, extension: Option<Extension>) -> Result<FlatModel, CliError> {
    let module = match extension {
        Some(ext) => SpinorModule::new(sig, ext),
        None => SpinorModule::minimal(sig),
    }
    .map_err(|e| CliError::Invalid(e.to_string()))?;
    let kappa = find_squaring_map(&module, parity)
        .ok_or_else(|| CliError::Invalid(format!("no {parity:?} squaring map on this module")))?;
    FlatModel::build(module, kappa).map_err(|e| CliError::Invalid(e.to_string()))
}

/// The odd part `S′`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpinorChoice {
    #[default]
    Full,
    /// The first `n` basis spinors.
    First(usize),
    Span(Vec<SparseVec>),
}

/// The degree-zero part `𝔥`, in `𝔰𝔬(V)` coordinates.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubalgebraChoice {
    Full,
    Zero,
    /// `𝔥ᵐᵃˣ(S′, β̂)`: preserves `S′` and annihilates `β̂`.
    #[default]
    Max,
    Stabilizer,
    Span(Vec<SparseVec>),
}

/// The normalized cocycle `β̂ + γ̂`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CocycleChoice {
    #[default]
    Zero,
    /// `β̂(v, s) = scale·v·s`.
    Clifford { scale: Rational },
    /// A combination of the echelon basis of normalized cocycles.
    Basis { coefficients: Vec<Rational> },
    /// `β̂(e_a, −)` as matrices on `S`; `γ̂` is solved for.
    Beta { beta: Vec<SparseMatrix> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobInput {
    pub schema_version: u32,
    pub model: ModelSpec,
    #[serde(default)]
    pub s_prime: SpinorChoice,
    #[serde(default)]
    pub h: SubalgebraChoice,
    #[serde(default)]
    pub cocycle: CocycleChoice,
}

/// A parsed input with its model, cocycle and subalgebra.
pub struct Job {
    pub model: Arc<FlatModel>,
    pub cocycle: NormalizedCocycle,
    pub subalgebra: GradedSubalgebra,
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

impl JobInput {
    pub fn build(&self) -> Result<Job, CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Invalid(format!("unsupported schema_version {}", self.schema_version)));
        }
        let model = Arc::new(self.model.build()?);
        let l = model.layout();
        let invalid = |what: &str| CliError::Invalid(what.to_string());
        let in_range = |vs: &[SparseVec], n: usize| vs.iter().flatten().all(|(i, _)| *i < n);
        let s_prime = match &self.s_prime {
            SpinorChoice::Full => Subspace::full(l.s),
            SpinorChoice::First(n) if *n <= l.s => {
                Subspace::from_spanning(l.s, &(0..*n).map(|i| vec![(i, Rational::one())]).collect::<Vec<_>>())
            }
            SpinorChoice::First(_) => return Err(invalid("s_prime.first exceeds dim S")),
            SpinorChoice::Span(vs) if in_range(vs, l.s) => Subspace::from_spanning(l.s, &normalized(vs)),
            SpinorChoice::Span(_) => return Err(invalid("s_prime.span index out of range")),
        };
        let cocycle = match &self.cocycle {
            CocycleChoice::Zero => NormalizedCocycle::zero(l.v, l.s, l.h),
            CocycleChoice::Clifford { scale } => clifford_cocycle(&model, scale)?,
            CocycleChoice::Basis { coefficients } => {
                let basis = normalized_cocycle_basis(&model);
                if coefficients.len() != basis.len() {
                    return Err(CliError::Invalid(format!(
                        "cocycle.basis has {} coefficients, the basis has {} elements",
                        coefficients.len(),
                        basis.len()
                    )));
                }
                NormalizedCocycle::combine(coefficients, &basis)
            }
            CocycleChoice::Beta { beta } => {
                if beta.len() != l.v || beta.iter().any(|b| b.nrows() != l.s || b.ncols() != l.s) {
                    return Err(invalid("cocycle.beta must be dim V matrices of size dim S"));
                }
                NormalizedSystem::new(&model).complete(beta.clone()).map_err(crate::deform::DeformError::from)?
            }
        };
        let h = match &self.h {
            SubalgebraChoice::Full => Subspace::full(l.h),
            SubalgebraChoice::Zero => Subspace::zero(l.h),
            SubalgebraChoice::Max => h_max(&model, &s_prime, &cocycle.beta)?,
            SubalgebraChoice::Stabilizer => stabilizer(&model, &s_prime),
            SubalgebraChoice::Span(vs) if in_range(vs, l.h) => Subspace::from_spanning(l.h, &normalized(vs)),
            SubalgebraChoice::Span(_) => return Err(invalid("h.span index out of range")),
        };
        let subalgebra = GradedSubalgebra::build(model.clone(), Subspace::full(l.v), s_prime, h)?;
        Ok(Job { model, cocycle, subalgebra })
    }
}

fn normalized(vs: &[SparseVec]) -> Vec<SparseVec> {
    vs.iter().map(|v| crate::exactla::sparse::normalize(v.clone())).collect()
}
