//! Graded subalgebras `V′ ⊕ S′ ⊕ 𝔥` of a flat model.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::DeformError;
use crate::exactla::{kernel_basis, kernel_basis_with, sparse, ElimOptions, Rational, SparseMatrix, SparseVec, Subspace};
use crate::flatmodel::{restricted_kappa_rank, FlatModel, Layout, Parity, SuperAlgebra};
use crate::spencer::Host;

/// The closure condition a candidate subalgebra violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Closure {
    /// `κ(S′, S′) ⊄ V′`; witness is a pair of `S′` basis indices.
    KappaImage,
    /// `𝔥·V′ ⊄ V′`; witness is (`𝔥` index, `V′` index).
    HOnV,
    /// `𝔥·S′ ⊄ S′`; witness is (`𝔥` index, `S′` index).
    HOnS,
    /// `[𝔥, 𝔥] ⊄ 𝔥`; witness is a pair of `𝔥` indices.
    HBracket,
}

#[derive(Clone, Debug)]
pub struct GradedSubalgebra {
    model: Arc<FlatModel>,
    v_prime: Subspace,
    s_prime: Subspace,
    h: Subspace,
    h_matrices: Vec<SparseMatrix>,
    h_rho: Vec<SparseMatrix>,
}

/// `κ(s, t)` for sparse spinors.
pub(crate) fn kappa_of(model: &FlatModel, s: &[(usize, Rational)], t: &[(usize, Rational)]) -> SparseVec {
    model
        .kappa()
        .components
        .iter()
        .enumerate()
        .filter_map(|(a, k)| {
            let x = sparse::dot(s, &k.mul_sparse_vec(t));
            (!x.is_zero()).then_some((a, x))
        })
        .collect()
}

impl GradedSubalgebra {
    /// Verifies the closure conditions and builds the subalgebra.
    pub fn build(
        model: Arc<FlatModel>,
        v_prime: Subspace,
        s_prime: Subspace,
        h: Subspace,
    ) -> Result<Self, DeformError> {
        let l = model.layout();
        for (name, sp, n) in [("V′", &v_prime, l.v), ("S′", &s_prime, l.s), ("𝔥", &h, l.h)] {
            if sp.ambient_dim() != n {
                return Err(DeformError::Shape(format!(
                    "{name} lives in dimension {}, expected {n}",
                    sp.ambient_dim()
                )));
            }
        }
        let so = model.module().so_basis();
        let h_matrices: Vec<SparseMatrix> =
            h.basis().iter().map(|x| so.to_matrix(&sparse::to_dense(x, l.h))).collect();
        let h_rho: Vec<SparseMatrix> =
            h.basis().iter().map(|x| model.module().rho_of(&sparse::to_dense(x, l.h))).collect();
        let sub = GradedSubalgebra { model, v_prime, s_prime, h, h_matrices, h_rho };
        sub.check_closure()?;
        Ok(sub)
    }

    /// The whole flat model.
    pub fn full(model: Arc<FlatModel>) -> Self {
        let l = model.layout();
        Self::build(model, Subspace::full(l.v), Subspace::full(l.s), Subspace::full(l.h))
            .expect("the flat model is a subalgebra of itself")
    }

    fn check_closure(&self) -> Result<(), DeformError> {
        let w = self.s_prime.basis();
        for j in 0..w.len() {
            for k in self.pair_start(j)..w.len() {
                if !self.v_prime.contains(&kappa_of(&self.model, &w[j], &w[k])) {
                    return Err(DeformError::NotClosed { closure: Closure::KappaImage, witness: (j, k) });
                }
            }
        }
        for (k, a) in self.h_matrices.iter().enumerate() {
            for (b, v) in self.v_prime.basis().iter().enumerate() {
                if !self.v_prime.contains(&a.mul_sparse_vec(v)) {
                    return Err(DeformError::NotClosed { closure: Closure::HOnV, witness: (k, b) });
                }
            }
        }
        for (k, r) in self.h_rho.iter().enumerate() {
            for (j, s) in w.iter().enumerate() {
                if !self.s_prime.contains(&r.mul_sparse_vec(s)) {
                    return Err(DeformError::NotClosed { closure: Closure::HOnS, witness: (k, j) });
                }
            }
        }
        for k in 0..self.h_matrices.len() {
            for m in k + 1..self.h_matrices.len() {
                if self.h_coords_of_matrix(&self.h_matrices[k].commutator(&self.h_matrices[m])).is_none() {
                    return Err(DeformError::NotClosed { closure: Closure::HBracket, witness: (k, m) });
                }
            }
        }
        Ok(())
    }

    fn pair_start(&self, j: usize) -> usize {
        match self.model.parity() {
            Parity::Symmetric => j,
            Parity::Skew => j + 1,
        }
    }

    pub fn model(&self) -> &FlatModel {
        &self.model
    }

    pub fn model_arc(&self) -> &Arc<FlatModel> {
        &self.model
    }

    pub fn v_prime(&self) -> &Subspace {
        &self.v_prime
    }

    pub fn s_prime(&self) -> &Subspace {
        &self.s_prime
    }

    /// `𝔥` in `𝔰𝔬(V)` coordinates.
    pub fn h(&self) -> &Subspace {
        &self.h
    }

    /// Basis of `𝔥` as matrices on `V`.
    pub fn h_matrices(&self) -> &[SparseMatrix] {
        &self.h_matrices
    }

    /// Basis of `𝔥` acting on `S`.
    pub fn h_rho(&self) -> &[SparseMatrix] {
        &self.h_rho
    }

    pub fn parity(&self) -> Parity {
        self.model.parity()
    }

    pub fn is_highly_supersymmetric(&self) -> bool {
        2 * self.s_prime.dim() > self.model.layout().s
    }

    pub fn is_maximal(&self) -> bool {
        self.s_prime.dim() == self.model.layout().s
    }

    /// Layout of the sub-basis `V′ ⊕ S′ ⊕ 𝔥`.
    pub fn layout(&self) -> Layout {
        Layout { v: self.v_prime.dim(), s: self.s_prime.dim(), h: self.h.dim() }
    }

    /// `𝔥` coordinates of a skew matrix, if it lies in `𝔥`.
    pub fn h_coords_of_matrix(&self, a: &SparseMatrix) -> Option<Vec<Rational>> {
        let c = self.model.module().so_basis().coordinates(a).ok()?;
        self.h.coordinates(&sparse::from_dense(&c))
    }

    /// Sub-basis coordinates of a vector in `V′`.
    pub fn v_coords(&self, v: &[(usize, Rational)]) -> Option<Vec<Rational>> {
        self.v_prime.coordinates(v)
    }

    /// Sub-basis coordinates of a spinor in `S′`.
    pub fn s_coords(&self, s: &[(usize, Rational)]) -> Option<Vec<Rational>> {
        self.s_prime.coordinates(s)
    }

    /// The graded bracket in sub-basis coordinates, as a Spencer host.
    pub fn host(&self) -> Host {
        let l = self.layout();
        let mut alg = SuperAlgebra::new(l.degrees(), l.parities(self.parity()));
        let lift = |coords: Vec<Rational>, at: &dyn Fn(usize) -> usize| -> SparseVec {
            sparse::from_dense(&coords).into_iter().map(|(i, x)| (at(i), x)).collect()
        };
        let w = self.s_prime.basis();
        for j in 0..w.len() {
            for k in self.pair_start(j)..w.len() {
                let c = self.v_coords(&kappa_of(&self.model, &w[j], &w[k])).expect("closure checked");
                alg.set_bracket(l.si(j), l.si(k), lift(c, &|i| l.vi(i)));
            }
        }
        for (k, a) in self.h_matrices.iter().enumerate() {
            for (b, v) in self.v_prime.basis().iter().enumerate() {
                let c = self.v_coords(&a.mul_sparse_vec(v)).expect("closure checked");
                alg.set_bracket(l.hi(k), l.vi(b), lift(c, &|i| l.vi(i)));
            }
            for (j, s) in w.iter().enumerate() {
                let c = self.s_coords(&self.h_rho[k].mul_sparse_vec(s)).expect("closure checked");
                alg.set_bracket(l.hi(k), l.si(j), lift(c, &|i| l.si(i)));
            }
            for m in k + 1..self.h_matrices.len() {
                let c = self
                    .h_coords_of_matrix(&a.commutator(&self.h_matrices[m]))
                    .expect("closure checked");
                alg.set_bracket(l.hi(k), l.hi(m), lift(c, &|i| l.hi(i)));
            }
        }
        Host::new(alg, l)
    }

    /// The graded algebra `𝔞` in sub-basis coordinates.
    pub fn graded_algebra(&self) -> SuperAlgebra {
        self.host().algebra
    }

    /// A random highly supersymmetric subalgebra with `V′ = V`, drawn from
    /// three families: `S′ = S` with a small `𝔥`; `S′` spanned by orbits of
    /// random spinors under commuting rotations; a random `S′` with its full
    /// stabilizer as `𝔥`.
    pub fn random_highly_supersymmetric<R: Rng>(model: Arc<FlatModel>, rng: &mut R) -> Result<Self, DeformError> {
        let l = model.layout();
        let so = model.module().so_basis();
        let n = l.v;
        match rng.gen_range(0..3) {
            0 => {
                let mut idx: Vec<usize> = (0..n).collect();
                idx.shuffle(rng);
                let k = rng.gen_range(2..=n.min(4));
                let chosen = &idx[..k];
                let gens: Vec<SparseVec> = so
                    .pairs()
                    .iter()
                    .enumerate()
                    .filter(|(_, (a, b))| chosen.contains(a) && chosen.contains(b))
                    .map(|(i, _)| vec![(i, Rational::one())])
                    .collect();
                let h = Subspace::from_spanning(l.h, &gens);
                Self::build(model, Subspace::full(n), Subspace::full(l.s), h)
            }
            1 => {
                let mut idx: Vec<usize> = (0..n).collect();
                idx.shuffle(rng);
                let planes = if n >= 4 { rng.gen_range(1..=2) } else { 1 };
                let gens: Vec<usize> = (0..planes)
                    .map(|p| {
                        let (a, b) = (idx[2 * p].min(idx[2 * p + 1]), idx[2 * p].max(idx[2 * p + 1]));
                        so.index(a, b).expect("a < b")
                    })
                    .collect();
                let rhos: Vec<&SparseMatrix> = gens.iter().map(|&k| model.module().rho(k)).collect();
                let mut vecs: Vec<SparseVec> = Vec::new();
                let mut span = Subspace::zero(l.s);
                while 2 * span.dim() <= l.s {
                    let x: SparseVec = sparse::from_dense(
                        &(0..l.s).map(|_| Rational::from_int(rng.gen_range(-3..=3))).collect::<Vec<_>>(),
                    );
                    let mut orbit = vec![x];
                    for r in &rhos {
                        let more: Vec<SparseVec> = orbit.iter().map(|v| r.mul_sparse_vec(v)).collect();
                        orbit.extend(more);
                    }
                    vecs.extend(orbit);
                    span = Subspace::from_spanning(l.s, &vecs);
                }
                let h = Subspace::from_spanning(
                    l.h,
                    &gens.iter().map(|&k| vec![(k, Rational::one())]).collect::<Vec<_>>(),
                );
                Self::build(model, Subspace::full(n), span, h)
            }
            _ => {
                // S′ is cut out by a few small covectors so that its basis, and the
                // stabilizer computed from it, keep small coefficients.
                let codim = rng.gen_range(0..l.s - l.s / 2);
                let span = loop {
                    let rows: Vec<SparseVec> = (0..codim)
                        .map(|_| sparse::from_dense(&(0..l.s).map(|_| Rational::from_int(rng.gen_range(-2..=2))).collect::<Vec<_>>()))
                        .collect();
                    let span = kernel_basis(&SparseMatrix::from_normalized_rows(l.s, rows));
                    if span.dim() == l.s - codim {
                        break span;
                    }
                };
                let h = stabilizer(&model, &span);
                Self::build(model, Subspace::full(n), span, h)
            }
        }
    }
}

/// `{A ∈ 𝔰𝔬(V) : A·S′ ⊆ S′}` in `𝔰𝔬(V)` coordinates.
pub fn stabilizer(model: &FlatModel, s_prime: &Subspace) -> Subspace {
    let l = model.layout();
    let ann = kernel_basis(&s_prime.to_row_matrix());
    let mut rows: Vec<SparseVec> = Vec::new();
    for nvec in ann.basis() {
        let n_rho: Vec<SparseVec> = model.module().rho_all().iter().map(|r| r.tmul_sparse_vec(nvec)).collect();
        for w in s_prime.basis() {
            let row: SparseVec = n_rho
                .iter()
                .enumerate()
                .filter_map(|(k, nr)| {
                    let x = sparse::dot(nr, w);
                    (!x.is_zero()).then_some((k, x))
                })
                .collect();
            if !row.is_empty() {
                rows.push(row);
            }
        }
    }
    if rows.is_empty() {
        return Subspace::full(l.h);
    }
    // The rows carry large rationals whenever S′ is dense, so exact elimination
    // is slow even on small systems; the modular kernel is verified before use.
    let opts = ElimOptions { dense_threshold: 0, ..ElimOptions::default() };
    kernel_basis_with(&SparseMatrix::from_normalized_rows(l.h, rows), &opts)
}

/// Whether `κ` restricted to `S′` is onto `V` (rank check on pairs of basis spinors).
pub fn homogeneity_check(sub: &GradedSubalgebra) -> bool {
    let l = sub.model().layout();
    sub.s_prime().dim() > 0 && restricted_kappa_rank(sub.model().kappa(), sub.s_prime().basis(), l.s) == l.v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::Signature;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn model(p: usize, q: usize, parity: Parity) -> Arc<FlatModel> {
        Arc::new(FlatModel::minimal(Signature::auto(p, q).unwrap(), parity).unwrap())
    }

    #[test]
    fn full_model_is_a_subalgebra_and_host_matches() {
        let m = model(1, 3, Parity::Symmetric);
        let sub = GradedSubalgebra::full(m.clone());
        assert!(homogeneity_check(&sub));
        assert_eq!(sub.graded_algebra(), *m.algebra());
    }

    #[test]
    fn random_subspace_is_not_invariant_under_so() {
        let m = model(1, 3, Parity::Symmetric);
        let l = m.layout();
        let s = Subspace::from_dense_spanning(
            l.s,
            &[vec![1, 2, 0, -1], vec![0, 1, 3, 1], vec![2, 0, 1, 1]]
                .into_iter()
                .map(|v| v.into_iter().map(Rational::from_int).collect())
                .collect::<Vec<_>>(),
        );
        let err = GradedSubalgebra::build(m, Subspace::full(l.v), s, Subspace::full(l.h)).unwrap_err();
        assert!(matches!(err, DeformError::NotClosed { closure: Closure::HOnS, .. }));
    }

    #[test]
    fn chiral_half_is_invariant() {
        let sig = Signature::auto(1, 9).unwrap();
        let module = crate::clifford::SpinorModule::new(
            sig,
            crate::clifford::Extension::Chiral { plus: 1, minus: 1 },
        )
        .unwrap();
        let kappa = crate::flatmodel::find_squaring_map(&module, Parity::Symmetric).unwrap();
        let m = Arc::new(FlatModel::build(module, kappa).unwrap());
        let l = m.layout();
        let half = Subspace::from_spanning(l.s, &(0..l.s / 2).map(|i| vec![(i, Rational::one())]).collect::<Vec<_>>());
        let v_prime = Subspace::from_spanning(
            l.v,
            &half
                .basis()
                .iter()
                .flat_map(|s| half.basis().iter().map(move |t| (s, t)))
                .map(|(s, t)| kappa_of(&m, s, t))
                .collect::<Vec<_>>(),
        );
        let sub = GradedSubalgebra::build(m, v_prime, half, Subspace::full(l.h)).unwrap();
        assert!(sub.h().dim() == l.h);
    }

    #[test]
    fn random_subalgebras_are_highly_supersymmetric() {
        let m = model(1, 3, Parity::Symmetric);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..12 {
            let sub = GradedSubalgebra::random_highly_supersymmetric(m.clone(), &mut rng).unwrap();
            assert!(sub.is_highly_supersymmetric());
            assert!(homogeneity_check(&sub));
        }
    }

    #[test]
    fn zero_odd_part_fails_homogeneity() {
        let m = model(1, 3, Parity::Symmetric);
        let l = m.layout();
        let sub = GradedSubalgebra::build(m, Subspace::full(l.v), Subspace::zero(l.s), Subspace::full(l.h)).unwrap();
        assert!(!homogeneity_check(&sub));
    }
}
