//! Admissibility of an `𝔥`-invariant normalized cocycle `β̂ + γ̂` for a
//! highly supersymmetric subalgebra, with `λ = γ̂∘Σ`.

use super::dirac::{dirac_kernel, squaring_section, DiracKernel, Section};
use super::envelope::gamma_on_pairs;
use super::subalgebra::{kappa_of, GradedSubalgebra};
use super::{DeformError, ObstructionKind};
use crate::exactla::{solve, sparse, Rational, SparseMatrix, SparseVec};
use crate::flatmodel::FlatModel;
use crate::spencer::{act_on_beta, act_on_gamma, ad_matrix, NormalizedCocycle, NormalizedSystem};

/// `λ: V → 𝔰𝔬(V)` with `rows[a]` the `𝔰𝔬(V)` coordinates of `λ(e_a)`.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct LambdaMap {
    pub rows: Vec<Vec<Rational>>,
}

impl LambdaMap {
    pub fn zero(vdim: usize, hdim: usize) -> Self {
        LambdaMap { rows: vec![vec![Rational::zero(); hdim]; vdim] }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(Rational::is_zero)
    }

    /// `λ(v)` in `𝔰𝔬(V)` coordinates.
    pub fn apply(&self, v: &[(usize, Rational)]) -> Vec<Rational> {
        let hdim = self.rows.first().map_or(0, Vec::len);
        let mut acc = vec![Rational::zero(); hdim];
        for (a, c) in v {
            for (x, y) in acc.iter_mut().zip(&self.rows[*a]) {
                *x += c * y;
            }
        }
        acc
    }

    /// `α(e_a, e_b) = λ(e_a)e_b − λ(e_b)e_a`.
    pub fn alpha(&self, model: &FlatModel, a: usize, b: usize) -> SparseVec {
        let so = model.module().so_basis();
        let la = so.to_matrix(&self.rows[a]).column(b);
        let lb = so.to_matrix(&self.rows[b]).column(a);
        sparse::axpy(&la, &-Rational::one(), &lb)
    }
}

/// An admissible cocycle with its section and the canonical `λ`.
#[derive(Clone, Debug)]
pub struct AdmissibleData {
    pub subalgebra: GradedSubalgebra,
    pub cocycle: NormalizedCocycle,
    pub kernel: DiracKernel,
    pub section: Section,
    pub lambda: LambdaMap,
}

impl AdmissibleData {
    /// The same data with another section and the `λ` it induces.
    pub fn with_section(&self, section: Section) -> Result<AdmissibleData, DeformError> {
        admissibility_check(&self.subalgebra, self.cocycle.clone(), Some(section))
    }

    /// The same data with `λ` replaced; the change must be a map `V → 𝔥`.
    pub fn with_lambda(&self, lambda: LambdaMap) -> Result<AdmissibleData, DeformError> {
        for (a, (x, y)) in lambda.rows.iter().zip(&self.lambda.rows).enumerate() {
            let diff: Vec<Rational> = x.iter().zip(y).map(|(p, q)| p - q).collect();
            if !self.subalgebra.h().contains(&sparse::from_dense(&diff)) {
                return Err(DeformError::Membership { what: "λ − γ̂∘Σ ∈ Hom(V, 𝔥)", witness: vec![a] });
            }
        }
        let mut out = self.clone();
        out.lambda = lambda;
        check_memberships(&out)?;
        Ok(out)
    }
}

/// Checks `𝔥`-invariance of `β̂ + γ̂`, `γ̂(𝔇) ⊆ 𝔥` and the three membership
/// conditions for `λ = γ̂∘Σ`. `Σ` is solved for when not supplied.
pub fn admissibility_check(
    sub: &GradedSubalgebra,
    cocycle: NormalizedCocycle,
    section: Option<Section>,
) -> Result<AdmissibleData, DeformError> {
    let model = sub.model();
    let l = model.layout();
    if sub.v_prime().dim() != l.v {
        return Err(DeformError::VPrimeNotFull);
    }
    if !sub.is_highly_supersymmetric() {
        return Err(DeformError::NotHighlySupersymmetric { s_dim: sub.s_prime().dim(), s_total: l.s });
    }
    if cocycle.beta.len() != l.v || cocycle.gamma.len() != l.h || cocycle.sdim() != l.s {
        return Err(DeformError::Shape("cocycle does not match the flat model".into()));
    }
    for (k, (a, rho)) in sub.h_matrices().iter().zip(sub.h_rho()).enumerate() {
        if act_on_beta(a, rho, &cocycle.beta).iter().any(|m| !m.is_zero()) {
            return Err(DeformError::obstructed(ObstructionKind::NotInvariant, vec![k], "𝔥 moves β̂"));
        }
        let ad = ad_matrix(model, a)?;
        if act_on_gamma(&ad, rho, &cocycle.gamma).iter().any(|m| !m.is_zero()) {
            return Err(DeformError::obstructed(ObstructionKind::NotInvariant, vec![k], "𝔥 moves γ̂"));
        }
    }
    let kernel = dirac_kernel(sub);
    let section = match section {
        Some(s) => {
            if s.pairs != kernel.pairs || s.columns.len() != l.v || !s.splits(&kernel) {
                return Err(DeformError::Shape("supplied section does not split κ on S′".into()));
            }
            s
        }
        None => squaring_section(sub, &kernel)?,
    };
    for (i, d) in kernel.basis.iter().enumerate() {
        let g = gamma_on_pairs(&cocycle, sub.s_prime(), &kernel, d);
        if !sub.h().contains(&sparse::from_dense(&g)) {
            return Err(DeformError::obstructed(
                ObstructionKind::DiracKernelImageOutsideH,
                vec![i],
                format!("γ̂ of Dirac kernel basis element {i} is not in 𝔥"),
            ));
        }
    }
    let lambda = LambdaMap {
        rows: section.columns.iter().map(|x| gamma_on_pairs(&cocycle, sub.s_prime(), &kernel, x)).collect(),
    };
    let data = AdmissibleData { subalgebra: sub.clone(), cocycle, kernel, section, lambda };
    check_memberships(&data)?;
    Ok(data)
}

/// The three membership conditions on `λ`.
fn check_memberships(data: &AdmissibleData) -> Result<(), DeformError> {
    let sub = &data.subalgebra;
    let model = sub.model();
    let so = model.module().so_basis();
    let w = sub.s_prime().basis();
    let lambda_rho: Vec<SparseMatrix> = data.lambda.rows.iter().map(|x| model.module().rho_of(x)).collect();
    for (a, r) in lambda_rho.iter().enumerate() {
        let op = data.cocycle.beta[a].add(r);
        for (j, s) in w.iter().enumerate() {
            if !sub.s_prime().contains(&op.mul_sparse_vec(s)) {
                return Err(DeformError::obstructed(
                    ObstructionKind::SectionCondition,
                    vec![a, j],
                    format!("β̂(e_{a}, w_{j}) + λ(e_{a})·w_{j} leaves S′"),
                ));
            }
        }
    }
    for &(j, k) in data.kernel.pairs.pairs() {
        let g = data.cocycle.gamma_eval(&w[j], &w[k]);
        let lk = data.lambda.apply(&kappa_of(model, &w[j], &w[k]));
        let diff: Vec<Rational> = g.iter().zip(&lk).map(|(x, y)| x - y).collect();
        if !sub.h().contains(&sparse::from_dense(&diff)) {
            return Err(DeformError::Membership { what: "γ̂ − λ∘κ ∈ 𝔥", witness: vec![j, k] });
        }
    }
    let lambda_mats: Vec<SparseMatrix> = data.lambda.rows.iter().map(|x| so.to_matrix(x)).collect();
    for (k, a_mat) in sub.h_matrices().iter().enumerate() {
        for (b, lb) in lambda_mats.iter().enumerate() {
            let comm = so.coordinates(&a_mat.commutator(lb))?;
            let l_ab = data.lambda.apply(&a_mat.column(b));
            let diff: Vec<Rational> = comm.iter().zip(&l_ab).map(|(x, y)| x - y).collect();
            if !sub.h().contains(&sparse::from_dense(&diff)) {
                return Err(DeformError::Membership { what: "[A, λ(v)] − λ(Av) ∈ 𝔥", witness: vec![k, b] });
            }
        }
    }
    Ok(())
}

/// The normalized cocycle with `β̂(v, s) = c·v·s` (Clifford multiplication),
/// when that is a cocycle.
pub fn clifford_cocycle(model: &FlatModel, c: &Rational) -> Result<NormalizedCocycle, DeformError> {
    let gammas = model
        .module()
        .clifford()
        .ok_or_else(|| DeformError::Shape("S is not a sum of pinor modules".into()))?;
    let beta = gammas.iter().map(|g| g.scale(c)).collect();
    Ok(NormalizedSystem::new(model).complete(beta)?)
}

/// The unique `λ` with `α(e_a, e_b) = λ(e_a)e_b − λ(e_b)e_a`, where
/// `alpha[i]` is `α` on the `i`-th pair `a < b` of the `𝔰𝔬(V)` basis.
pub fn lambda_from_alpha(model: &FlatModel, alpha: &[SparseVec]) -> Result<LambdaMap, DeformError> {
    let so = model.module().so_basis();
    let n = model.layout().v;
    let h = so.len();
    if alpha.len() != h {
        return Err(DeformError::Shape(format!("α has {} pairs, expected {h}", alpha.len())));
    }
    // Unknown (a, k) ↦ column a*h + k; row (pair i, component c) ↦ i*n + c.
    let mut trip: Vec<(usize, usize, Rational)> = Vec::new();
    for (i, &(a, b)) in so.pairs().iter().enumerate() {
        for k in 0..h {
            let e = so.matrix(k);
            for (c, x) in e.column(b) {
                trip.push((i * n + c, a * h + k, x));
            }
            for (c, x) in e.column(a) {
                trip.push((i * n + c, b * h + k, -x));
            }
        }
    }
    let m = SparseMatrix::from_triplets(h * n, n * h, trip);
    let mut rhs = vec![Rational::zero(); h * n];
    for (i, v) in alpha.iter().enumerate() {
        for (c, x) in v {
            rhs[i * n + c] = x.clone();
        }
    }
    let x = solve(&m, &rhs)?;
    let lambda = LambdaMap { rows: x.chunks(h).map(<[Rational]>::to_vec).collect() };
    for (i, &(a, b)) in so.pairs().iter().enumerate() {
        if lambda.alpha(model, a, b) != sparse::normalize(alpha[i].clone()) {
            return Err(DeformError::Shape(format!("λ does not reproduce α on pair {i}")));
        }
    }
    Ok(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::Signature;
    use crate::flatmodel::Parity;
    use crate::spencer::normalized_cocycle_basis;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn model(p: usize, q: usize, parity: Parity) -> Arc<FlatModel> {
        Arc::new(FlatModel::minimal(Signature::auto(p, q).unwrap(), parity).unwrap())
    }

    #[test]
    fn zero_alpha_gives_zero_lambda() {
        let m = model(1, 2, Parity::Symmetric);
        let l = lambda_from_alpha(&m, &vec![Vec::new(); 3]).unwrap();
        assert!(l.is_zero());
    }

    #[test]
    fn random_alpha_round_trips() {
        let m = model(1, 2, Parity::Symmetric);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let alpha: Vec<SparseVec> = (0..3)
                .map(|_| sparse::from_dense(&(0..3).map(|_| Rational::new(rng.gen_range(-5..=5), rng.gen_range(1..=4))).collect::<Vec<_>>()))
                .collect();
            let lambda = lambda_from_alpha(&m, &alpha).unwrap();
            // Independent substitution with dense matrices.
            let so = m.module().so_basis();
            for (i, &(a, b)) in so.pairs().iter().enumerate() {
                let la = so.to_matrix(&lambda.rows[a]).to_dense();
                let lb = so.to_matrix(&lambda.rows[b]).to_dense();
                let got: Vec<Rational> = (0..3).map(|c| &la[c][b] - &lb[c][a]).collect();
                assert_eq!(got, sparse::to_dense(&alpha[i], 3));
            }
        }
    }

    #[test]
    fn trivial_h_admits_exactly_the_cocycles_with_zero_envelope() {
        let m = model(1, 3, Parity::Symmetric);
        let l = m.layout();
        let sub = GradedSubalgebra::build(
            m.clone(),
            crate::exactla::Subspace::full(l.v),
            crate::exactla::Subspace::full(l.s),
            crate::exactla::Subspace::zero(l.h),
        )
        .unwrap();
        let kernel = super::super::dirac_kernel(&sub);
        for x in normalized_cocycle_basis(&m) {
            let env = super::super::envelope(&x, sub.s_prime(), &kernel);
            match admissibility_check(&sub, x, None) {
                Ok(adm) => {
                    assert!(adm.section.splits(&adm.kernel));
                    assert_eq!(env.dim(), 0);
                }
                Err(e) => {
                    let kind = e.obstruction().map(|o| o.kind);
                    if env.dim() > 0 {
                        assert_eq!(kind, Some(ObstructionKind::DiracKernelImageOutsideH));
                    } else {
                        assert!(kind.is_some() || matches!(e, DeformError::Membership { .. }), "{e}");
                    }
                }
            }
        }
        let zero = NormalizedCocycle::zero(l.v, l.s, l.h);
        let adm = admissibility_check(&GradedSubalgebra::full(m), zero, None).unwrap();
        assert!(adm.lambda.is_zero());
    }

    #[test]
    fn non_invariant_cocycle_is_rejected_first() {
        let m = model(1, 3, Parity::Symmetric);
        let sub = GradedSubalgebra::full(m.clone());
        let x = normalized_cocycle_basis(&m).into_iter().next().unwrap();
        let err = admissibility_check(&sub, x, None).unwrap_err();
        assert_eq!(err.obstruction().unwrap().kind, ObstructionKind::NotInvariant);
    }
}
