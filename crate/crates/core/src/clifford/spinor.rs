//! Spinor modules used as odd parts: copies of the pinor module or of its
//! chiral halves, with the induced spin action.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{CliffordError, PinorModule, Signature, SoBasis, SpinAction};
use crate::exactla::{Rational, SparseMatrix, Subspace};

/// Which module is used: `S ⊗ ℝᴺ` or `S₊^{N₊} ⊕ S₋^{N₋}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extension {
    Copies(usize),
    Chiral { plus: usize, minus: usize },
}

impl Extension {
    pub fn copies(&self) -> usize {
        match *self {
            Extension::Copies(n) => n,
            Extension::Chiral { plus, minus } => plus + minus,
        }
    }
}

impl fmt::Display for Extension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extension::Copies(n) => write!(f, "N={n}"),
            Extension::Chiral { plus, minus } => write!(f, "N=({plus},{minus})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SpinorModule {
    pinor: PinorModule,
    so: SoBasis,
    extension: Extension,
    /// Columns: basis of `S` inside the direct sum of pinor copies.
    embedding: SparseMatrix,
    /// Left inverse of the embedding on its image.
    projection: SparseMatrix,
    rho: Vec<SparseMatrix>,
    clifford: Option<Vec<SparseMatrix>>,
}

impl SpinorModule {
    /// The smallest module: a chiral half when the volume element splits the
    /// pinor module, the pinor module otherwise.
    pub fn minimal(signature: Signature) -> Result<Self, CliffordError> {
        let pinor = PinorModule::build(signature)?;
        let ext = if pinor.chirality().is_some() {
            Extension::Chiral { plus: 1, minus: 0 }
        } else {
            Extension::Copies(1)
        };
        Self::from_pinor(pinor, ext)
    }

    pub fn new(signature: Signature, extension: Extension) -> Result<Self, CliffordError> {
        Self::from_pinor(PinorModule::build(signature)?, extension)
    }

    pub fn from_pinor(pinor: PinorModule, extension: Extension) -> Result<Self, CliffordError> {
        let so = SoBasis::new(*pinor.signature());
        let d = pinor.dim();
        let blocks: Vec<Subspace> = match extension {
            Extension::Copies(n) => {
                if n == 0 {
                    return Err(CliffordError::InvalidSignature("extension must be at least 1".into()));
                }
                vec![Subspace::full(d); n]
            }
            Extension::Chiral { plus, minus } => {
                if plus + minus == 0 {
                    return Err(CliffordError::InvalidSignature("extension must be at least 1".into()));
                }
                let ch = pinor.chirality().ok_or(CliffordError::NoChirality)?;
                std::iter::repeat_n(ch.plus.clone(), plus)
                    .chain(std::iter::repeat_n(ch.minus.clone(), minus))
                    .collect()
            }
        };
        let total = d * blocks.len();
        let mut cols = Vec::new();
        let mut proj_rows = Vec::new();
        for (k, b) in blocks.iter().enumerate() {
            for (v, piv) in b.basis().iter().zip(b.pivots()) {
                cols.push(v.iter().map(|(i, x)| (k * d + i, x.clone())).collect::<Vec<_>>());
                proj_rows.push(vec![(k * d + piv, Rational::one())]);
            }
        }
        let embedding = SparseMatrix::from_columns(total, &cols);
        let projection = SparseMatrix::from_rows(total, proj_rows);
        let spin = SpinAction::new(&so, &pinor);
        let lift = |m: &SparseMatrix| SparseMatrix::identity(blocks.len()).kron(m);
        let rho = spin
            .matrices()
            .iter()
            .map(|r| projection.mul(&lift(r)).mul(&embedding))
            .collect();
        let clifford = matches!(extension, Extension::Copies(_))
            .then(|| pinor.gamma_matrices().iter().map(lift).collect());
        Ok(SpinorModule { pinor, so, extension, embedding, projection, rho, clifford })
    }

    pub fn signature(&self) -> &Signature {
        self.pinor.signature()
    }

    pub fn pinor(&self) -> &PinorModule {
        &self.pinor
    }

    pub fn so_basis(&self) -> &SoBasis {
        &self.so
    }

    pub fn extension(&self) -> Extension {
        self.extension
    }

    pub fn dim(&self) -> usize {
        self.embedding.ncols()
    }

    pub fn embedding(&self) -> &SparseMatrix {
        &self.embedding
    }

    pub fn projection(&self) -> &SparseMatrix {
        &self.projection
    }

    /// Spin action of the `k`-th `𝔰𝔬(V)` basis element.
    pub fn rho(&self, k: usize) -> &SparseMatrix {
        &self.rho[k]
    }

    pub fn rho_all(&self) -> &[SparseMatrix] {
        &self.rho
    }

    /// `ρ(Σ x_k E_k)`.
    pub fn rho_of(&self, coords: &[Rational]) -> SparseMatrix {
        let mut acc = SparseMatrix::zeros(self.dim(), self.dim());
        for (c, m) in coords.iter().zip(&self.rho) {
            if !c.is_zero() {
                acc = acc.add_scaled(c, m);
            }
        }
        acc
    }

    /// Clifford action of basis vectors, when `S` is a sum of full pinor copies.
    pub fn clifford(&self) -> Option<&[SparseMatrix]> {
        self.clifford.as_deref()
    }

    /// Restricts a bilinear form on the pinor copies to `S`.
    pub fn restrict_form(&self, form: &SparseMatrix) -> SparseMatrix {
        self.embedding.transpose().mul(form).mul(&self.embedding)
    }

    /// Lifts a pinor-level operator to the copies.
    pub fn lift(&self, m: &SparseMatrix) -> SparseMatrix {
        SparseMatrix::identity(self.extension.copies()).kron(m)
    }

    /// Whether an operator on the pinor copies maps `S` into itself.
    pub fn preserves(&self, m: &SparseMatrix) -> bool {
        let emb_t = self.embedding.transpose();
        emb_t.rows().iter().all(|col| {
            let image = m.mul_sparse_vec(col);
            self.embedding.mul_sparse_vec(&self.projection.mul_sparse_vec(&image)) == image
        })
    }
}
