//! Envelopes `γ(𝔇)`, Lie pairs, the maximal stabilizer `𝔥ᵐᵃˣ` and
//! `𝔥`-invariant normalized cocycles.

use super::dirac::DiracKernel;
use super::subalgebra::stabilizer;
use super::DeformError;
use crate::exactla::{kernel_basis, sparse, Rational, SparseMatrix, SparseVec, Subspace};
use crate::flatmodel::FlatModel;
use crate::spencer::{act_on_beta, invariants_under, normalized_cocycle_basis, NormalizedCocycle};

/// `γ` of a pair vector, in `𝔰𝔬(V)` coordinates.
pub(crate) fn gamma_on_pairs(
    cocycle: &NormalizedCocycle,
    s_prime: &Subspace,
    kernel: &DiracKernel,
    x: &[(usize, Rational)],
) -> Vec<Rational> {
    let w = s_prime.basis();
    kernel.pairs.evaluate(x, cocycle.gamma.len(), |j, l| cocycle.gamma_eval(&w[j], &w[l]))
}

/// The span of `γ(𝔇)` in `𝔰𝔬(V)` coordinates.
pub fn envelope(cocycle: &NormalizedCocycle, s_prime: &Subspace, kernel: &DiracKernel) -> Subspace {
    let vecs: Vec<SparseVec> = kernel
        .basis
        .iter()
        .map(|d| sparse::from_dense(&gamma_on_pairs(cocycle, s_prime, kernel, d)))
        .collect();
    Subspace::from_spanning(cocycle.gamma.len(), &vecs)
}

fn flatten(ms: &[SparseMatrix]) -> SparseVec {
    let mut out = Vec::new();
    let mut off = 0;
    for m in ms {
        for (r, c, x) in m.triplets() {
            out.push((off + r * m.ncols() + c, x.clone()));
        }
        off += m.nrows() * m.ncols();
    }
    out
}

/// Whether every basis element `A` of the envelope has `A·β = 0` and `A·S′ ⊆ S′`.
pub fn lie_pair_check(model: &FlatModel, cocycle: &NormalizedCocycle, s_prime: &Subspace, env: &Subspace) -> bool {
    let so = model.module().so_basis();
    let l = model.layout();
    env.basis().iter().all(|x| {
        let dense = sparse::to_dense(x, l.h);
        let a = so.to_matrix(&dense);
        let rho = model.module().rho_of(&dense);
        act_on_beta(&a, &rho, &cocycle.beta).iter().all(SparseMatrix::is_zero)
            && s_prime.basis().iter().all(|s| s_prime.contains(&rho.mul_sparse_vec(s)))
    })
}

/// `{A ∈ 𝔰𝔬(V) : A·S′ ⊆ S′, A·β = 0}` in `𝔰𝔬(V)` coordinates.
pub fn h_max(model: &FlatModel, s_prime: &Subspace, beta: &[SparseMatrix]) -> Result<Subspace, DeformError> {
    let so = model.module().so_basis();
    let cols: Vec<SparseVec> = (0..so.len())
        .map(|k| flatten(&act_on_beta(so.matrix(k), model.module().rho(k), beta)))
        .collect();
    let rows = beta.iter().map(|b| b.nrows() * b.ncols()).sum::<usize>();
    let preserving_beta = if rows == 0 {
        Subspace::full(so.len())
    } else {
        kernel_basis(&SparseMatrix::from_columns(rows, &cols))
    };
    Ok(preserving_beta.intersection(&stabilizer(model, s_prime))?)
}

/// Basis of the `𝔥`-invariant normalized cocycles, `𝔥` given by matrices on `V`.
pub fn invariant_cocycles(model: &FlatModel, h: &[SparseMatrix]) -> Result<Vec<NormalizedCocycle>, DeformError> {
    Ok(invariants_under(model, h, &normalized_cocycle_basis(model))?)
}

/// Whether the envelope is closed under the commutator (checked on basis pairs).
pub fn is_commutator_closed(model: &FlatModel, env: &Subspace) -> bool {
    let so = model.module().so_basis();
    let n = so.len();
    let mats: Vec<SparseMatrix> = env.basis().iter().map(|x| so.to_matrix(&sparse::to_dense(x, n))).collect();
    (0..mats.len()).all(|i| {
        (i + 1..mats.len()).all(|j| {
            so.coordinates(&mats[i].commutator(&mats[j]))
                .map(|c| env.contains(&sparse::from_dense(&c)))
                .unwrap_or(false)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::Signature;
    use crate::deform::{dirac_kernel, GradedSubalgebra};
    use crate::flatmodel::Parity;
    use std::sync::Arc;

    #[test]
    fn zero_beta_has_zero_envelope_and_full_h_max() {
        let m = Arc::new(FlatModel::minimal(Signature::auto(1, 3).unwrap(), Parity::Symmetric).unwrap());
        let l = m.layout();
        let sub = GradedSubalgebra::full(m.clone());
        let k = dirac_kernel(&sub);
        let zero = NormalizedCocycle::zero(l.v, l.s, l.h);
        let env = envelope(&zero, sub.s_prime(), &k);
        assert_eq!(env.dim(), 0);
        assert!(lie_pair_check(&m, &zero, sub.s_prime(), &env));
        assert_eq!(h_max(&m, sub.s_prime(), &zero.beta).unwrap().dim(), l.h);
    }

    #[test]
    fn lie_pair_envelopes_are_subalgebras_inside_h_max() {
        let m = Arc::new(FlatModel::minimal(Signature::auto(1, 3).unwrap(), Parity::Symmetric).unwrap());
        let sub = GradedSubalgebra::full(m.clone());
        let k = dirac_kernel(&sub);
        for x in normalized_cocycle_basis(&m) {
            let env = envelope(&x, sub.s_prime(), &k);
            if lie_pair_check(&m, &x, sub.s_prime(), &env) {
                assert!(is_commutator_closed(&m, &env));
                assert!(env.is_subspace_of(&h_max(&m, sub.s_prime(), &x.beta).unwrap()));
            }
        }
    }

    #[test]
    fn h_max_annihilates_beta() {
        let m = FlatModel::minimal(Signature::auto(1, 3).unwrap(), Parity::Symmetric).unwrap();
        let so = m.module().so_basis();
        for x in normalized_cocycle_basis(&m) {
            let h = h_max(&m, &Subspace::full(m.layout().s), &x.beta).unwrap();
            for a in h.basis() {
                let d = sparse::to_dense(a, so.len());
                let img = act_on_beta(&so.to_matrix(&d), &m.module().rho_of(&d), &x.beta);
                assert!(img.iter().all(SparseMatrix::is_zero));
            }
        }
    }
}
