//! The Dirac kernel `𝔇 = ker κ|_{⊙²S′}` and sections `Σ: V → ⊙²S′` of `κ`.
//!
//! Elements of `⊙²S′` (or `⋀²S′` for a skew `κ`) are vectors over a
//! [`PairBasis`]: pair `(j, l)` stands for the product of the `S′` basis
//! vectors `w_j` and `w_l`, so a bilinear map `B` is evaluated on it as
//! `B(w_j, w_l)`.

use serde::{Deserialize, Serialize};

use super::subalgebra::{kappa_of, GradedSubalgebra};
use super::DeformError;
use crate::exactla::{kernel_basis, rank, solve, sparse, Rational, SparseMatrix, SparseVec};
use crate::flatmodel::Parity;

/// Pairs `j ≤ l` (symmetric) or `j < l` (skew) of `S′` basis indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairBasis {
    parity: Parity,
    pairs: Vec<(usize, usize)>,
}

impl PairBasis {
    pub fn new(m: usize, parity: Parity) -> Self {
        let pairs = (0..m)
            .flat_map(|j| {
                let start = if parity == Parity::Symmetric { j } else { j + 1 };
                (start..m).map(move |l| (j, l))
            })
            .collect();
        PairBasis { parity, pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// Evaluates a bilinear map, given on basis pairs, on a pair vector.
    pub fn evaluate<F>(&self, x: &[(usize, Rational)], n: usize, mut on_pair: F) -> Vec<Rational>
    where
        F: FnMut(usize, usize) -> Vec<Rational>,
    {
        let mut acc = vec![Rational::zero(); n];
        for (p, c) in x {
            let (j, l) = self.pairs[*p];
            for (a, y) in on_pair(j, l).iter().enumerate() {
                if !y.is_zero() {
                    acc[a] += c * y;
                }
            }
        }
        acc
    }
}

/// `κ` on the pair basis and the kernel of that matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiracKernel {
    pub pairs: PairBasis,
    /// `V × pairs`; column `p` is `κ` of pair `p`.
    pub kappa_matrix: SparseMatrix,
    /// Basis of `𝔇` as pair vectors.
    pub basis: Vec<SparseVec>,
}

impl DiracKernel {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn kappa_rank(&self) -> usize {
        self.pairs.len() - self.basis.len()
    }
}

pub fn dirac_kernel(sub: &GradedSubalgebra) -> DiracKernel {
    let model = sub.model();
    let w = sub.s_prime().basis();
    let pairs = PairBasis::new(w.len(), sub.parity());
    let cols: Vec<SparseVec> = pairs.pairs().iter().map(|&(j, l)| kappa_of(model, &w[j], &w[l])).collect();
    let kappa_matrix = SparseMatrix::from_columns(model.layout().v, &cols);
    let basis = if pairs.is_empty() { Vec::new() } else { kernel_basis(&kappa_matrix).into_basis() };
    DiracKernel { pairs, kappa_matrix, basis }
}

/// A right inverse of `κ: ⊙²S′ → V`; `columns[a] = Σ(e_a)` as a pair vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub pairs: PairBasis,
    pub columns: Vec<SparseVec>,
}

impl Section {
    pub fn of(&self, a: usize) -> &SparseVec {
        &self.columns[a]
    }

    /// `Σ(v)` for a vector `v ∈ V`.
    pub fn apply(&self, v: &[(usize, Rational)]) -> SparseVec {
        let mut acc: SparseVec = Vec::new();
        for (a, c) in v {
            acc = sparse::axpy(&acc, c, &self.columns[*a]);
        }
        acc
    }

    /// Checks `κ∘Σ = Id_V` against the pair-basis matrix of `κ`.
    pub fn splits(&self, kernel: &DiracKernel) -> bool {
        self.columns
            .iter()
            .enumerate()
            .all(|(a, x)| kernel.kappa_matrix.mul_sparse_vec(x) == vec![(a, Rational::one())])
    }

    /// `Σ + φ` with `φ(e_a) = Σ_i coeffs[a][i] d_i` for the kernel basis `d_i`.
    pub fn shifted(&self, kernel: &DiracKernel, coeffs: &[Vec<Rational>]) -> Section {
        let columns = self
            .columns
            .iter()
            .zip(coeffs)
            .map(|(col, cs)| {
                cs.iter()
                    .zip(&kernel.basis)
                    .fold(col.clone(), |acc, (c, d)| sparse::axpy(&acc, c, d))
            })
            .collect();
        Section { pairs: self.pairs.clone(), columns }
    }

    /// Whether `Σ − other` takes values in `𝔇`.
    pub fn differs_by_kernel_map(&self, other: &Section, kernel: &DiracKernel) -> bool {
        self.columns.iter().zip(&other.columns).all(|(x, y)| {
            kernel.kappa_matrix.mul_sparse_vec(&sparse::axpy(x, &-Rational::one(), y)).is_empty()
        })
    }
}

/// A section of `κ` by a deterministic solve, verified to split `κ`.
pub fn squaring_section(sub: &GradedSubalgebra, kernel: &DiracKernel) -> Result<Section, DeformError> {
    let vdim = sub.model().layout().v;
    let r = if kernel.pairs.is_empty() { 0 } else { rank(&kernel.kappa_matrix) };
    if r != vdim {
        return Err(DeformError::NotSurjective { rank: r, vdim });
    }
    let columns = (0..vdim)
        .map(|a| {
            let mut e = vec![Rational::zero(); vdim];
            e[a] = Rational::one();
            solve(&kernel.kappa_matrix, &e).map(|x| sparse::from_dense(&x))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let section = Section { pairs: kernel.pairs.clone(), columns };
    if !section.splits(kernel) {
        return Err(DeformError::Shape("solved section does not split κ".into()));
    }
    Ok(section)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::Signature;
    use crate::exactla::Subspace;
    use crate::flatmodel::FlatModel;
    use std::sync::Arc;

    fn full(p: usize, q: usize, parity: Parity) -> GradedSubalgebra {
        GradedSubalgebra::full(Arc::new(FlatModel::minimal(Signature::auto(p, q).unwrap(), parity).unwrap()))
    }

    #[test]
    fn rank_nullity_for_maximal_subalgebras() {
        let sub = full(1, 3, Parity::Symmetric);
        let k = dirac_kernel(&sub);
        assert_eq!(k.pairs.len(), 10);
        assert_eq!(k.dim(), 10 - 4);
        for d in &k.basis {
            assert!(k.kappa_matrix.mul_sparse_vec(d).is_empty());
        }
        let sub = full(0, 7, Parity::Skew);
        let k = dirac_kernel(&sub);
        assert_eq!(k.pairs.len(), 28);
        assert_eq!(k.dim(), 28 - 7);
    }

    #[test]
    fn sections_split_and_differ_by_kernel_maps() {
        let sub = full(1, 3, Parity::Symmetric);
        let k = dirac_kernel(&sub);
        let sigma = squaring_section(&sub, &k).unwrap();
        assert!(sigma.splits(&k));
        let coeffs: Vec<Vec<Rational>> =
            (0..4).map(|a| (0..k.dim()).map(|i| Rational::from_int((a * 3 + i) as i64 % 5 - 2)).collect()).collect();
        let other = sigma.shifted(&k, &coeffs);
        assert!(other.splits(&k));
        assert!(sigma.differs_by_kernel_map(&other, &k));
        assert_ne!(sigma, other);
    }

    #[test]
    fn non_surjective_subspace_has_no_section() {
        let m = Arc::new(FlatModel::minimal(Signature::auto(1, 3).unwrap(), Parity::Symmetric).unwrap());
        let l = m.layout();
        let sub = GradedSubalgebra::build(
            m,
            Subspace::full(l.v),
            Subspace::from_spanning(l.s, &[vec![(0, Rational::one())]]),
            Subspace::zero(l.h),
        )
        .unwrap();
        let k = dirac_kernel(&sub);
        assert!(matches!(squaring_section(&sub, &k), Err(DeformError::NotSurjective { rank: 1, vdim: 4 })));
    }
}
