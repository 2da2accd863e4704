//! Subspaces of `ℚⁿ` in canonical reverse echelon form.
//!
//! Each basis vector's pivot is its last nonzero coordinate, normalized to 1,
//! and every other basis vector vanishes there. Pivots increase along the
//! basis, so equal subspaces always have identical bases.

use serde::{Deserialize, Serialize};

use super::elim::{kernel_basis, reverse_echelon};
use super::sparse::{self, SparseMatrix, SparseVec};
use super::{LinalgError, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<SparseVec>,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace { ambient_dim, basis: Vec::new() }
    }

    pub fn full(ambient_dim: usize) -> Self {
        let basis = (0..ambient_dim).map(|i| vec![(i, Rational::one())]).collect();
        Subspace { ambient_dim, basis }
    }

    /// Span of arbitrary vectors.
    pub fn from_spanning(ambient_dim: usize, vecs: &[SparseVec]) -> Self {
        let vecs: Vec<SparseVec> = vecs.iter().filter(|v| !v.is_empty()).cloned().collect();
        Subspace { ambient_dim, basis: reverse_echelon(ambient_dim, &vecs) }
    }

    pub fn from_dense_spanning(ambient_dim: usize, vecs: &[Vec<Rational>]) -> Self {
        let sv: Vec<SparseVec> = vecs.iter().map(|v| sparse::from_dense(v)).collect();
        Self::from_spanning(ambient_dim, &sv)
    }

    /// Wraps vectors already in canonical form (debug-checked).
    pub(crate) fn from_canonical(ambient_dim: usize, basis: Vec<SparseVec>) -> Self {
        let s = Subspace { ambient_dim, basis };
        debug_assert!(s.is_canonical());
        s
    }

    /// Checks the canonical-form invariants.
    pub fn is_canonical(&self) -> bool {
        let pivots = self.pivots();
        if pivots.len() != self.basis.len() || pivots.windows(2).any(|w| w[0] >= w[1]) {
            return false;
        }
        self.basis.iter().enumerate().all(|(i, v)| {
            v.last().is_some_and(|(_, x)| x.is_one())
                && pivots
                    .iter()
                    .enumerate()
                    .all(|(k, &p)| k == i || sparse::get(v, p).is_zero())
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[SparseVec] {
        &self.basis
    }

    pub fn into_basis(self) -> Vec<SparseVec> {
        self.basis
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis.iter().filter_map(|v| v.last().map(|(j, _)| *j)).collect()
    }

    /// Matrix whose rows are the basis vectors.
    pub fn to_row_matrix(&self) -> SparseMatrix {
        SparseMatrix::from_normalized_rows(self.ambient_dim, self.basis.clone())
    }

    /// Matrix whose columns are the basis vectors.
    pub fn to_column_matrix(&self) -> SparseMatrix {
        SparseMatrix::from_columns(self.ambient_dim, &self.basis)
    }

    /// Coordinates of `v` in this basis, or `None` if `v` is not in the subspace.
    pub fn coordinates(&self, v: &[(usize, Rational)]) -> Option<Vec<Rational>> {
        let coords: Vec<Rational> = self.pivots().iter().map(|&p| sparse::get(v, p)).collect();
        let mut rest: SparseVec = v.to_vec();
        for (c, b) in coords.iter().zip(&self.basis) {
            if !c.is_zero() {
                rest = sparse::axpy(&rest, &-c, b);
            }
        }
        rest.is_empty().then_some(coords)
    }

    pub fn contains(&self, v: &[(usize, Rational)]) -> bool {
        self.coordinates(v).is_some()
    }

    /// Linear combination of basis vectors.
    pub fn combine(&self, coords: &[Rational]) -> SparseVec {
        let mut acc: SparseVec = Vec::new();
        for (c, b) in coords.iter().zip(&self.basis) {
            if !c.is_zero() {
                acc = sparse::axpy(&acc, c, b);
            }
        }
        acc
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|v| other.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_same_ambient(other)?;
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().cloned());
        Ok(Subspace::from_spanning(self.ambient_dim, &all))
    }

    pub fn intersection(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_same_ambient(other)?;
        if self.dim() == 0 || other.dim() == 0 {
            return Ok(Subspace::zero(self.ambient_dim));
        }
        let mut cols = self.basis.clone();
        cols.extend(other.basis.iter().map(|v| sparse::scale(v, &-Rational::one())));
        let m = SparseMatrix::from_columns(self.ambient_dim, &cols);
        let k = kernel_basis(&m);
        let vecs: Vec<SparseVec> = k
            .basis()
            .iter()
            .map(|c| {
                let coords: Vec<Rational> =
                    (0..self.dim()).map(|i| sparse::get(c, i)).collect();
                self.combine(&coords)
            })
            .collect();
        Ok(Subspace::from_spanning(self.ambient_dim, &vecs))
    }

    /// Image under a linear map `m` (columns indexed by this ambient space).
    pub fn image_under(&self, m: &SparseMatrix) -> Subspace {
        let vecs: Vec<SparseVec> = self.basis.iter().map(|v| m.mul_sparse_vec(v)).collect();
        Subspace::from_spanning(m.nrows(), &vecs)
    }

    fn check_same_ambient(&self, other: &Subspace) -> Result<(), LinalgError> {
        if self.ambient_dim != other.ambient_dim {
            return Err(LinalgError::Shape(format!(
                "ambient dimensions {} and {}",
                self.ambient_dim, other.ambient_dim
            )));
        }
        Ok(())
    }
}
