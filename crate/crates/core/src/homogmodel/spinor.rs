//! The Killing spinor equation and the spinor connection at the basepoint.
//!
//! For `X = A + v` in `𝔤 = 𝔥 ⊕ V` the spinor connection has Nomizu map
//! `Ψ(X) = ρ(A + λ(v)) + β̂(v, −)` on `S`. This is the connection
//! `∇ − 𝛃` with `𝛃 = −β̂`, so no sign choice is left to the caller.

use rayon::prelude::*;
use serde::Serialize;

use super::{
    constant_curvature, first_bianchi_failures, nomizu_levi_civita, wang_curvature, HomogError, MetricLiePair,
    NomizuMap,
};
use crate::deform::FilteredDeformation;
use crate::exactla::{sparse, Rational, RationalTensor, SparseVec};

/// Failures of `ρ(L(X))·s − [X, s] = −β̂(X̄, s)` over basis `X ∈ 𝔤`, `s ∈ S′`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KillingSpinorReport {
    pub checked: usize,
    pub failures: usize,
    pub first: Option<(usize, usize)>,
}

impl KillingSpinorReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Failures of `F(X, Y)·s = 0` over basis `X, Y ∈ 𝔤`, `s ∈ S′`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlatnessReport {
    pub checked: usize,
    pub failures: usize,
    pub first: Option<(usize, usize, usize)>,
    /// Whether the curvature also vanishes on all of `S`.
    pub flat_on_all_of_s: bool,
}

impl FlatnessReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// The images of the `𝔤` basis in `𝔰𝔬(V)` prescribed by the deformation:
/// `λ(e_a)` on `V` and the basis of `𝔥` itself.
fn prescribed_so(def: &FilteredDeformation) -> Result<Vec<Vec<Rational>>, HomogError> {
    let sub = def.graded_subalgebra()?;
    let hdim = sub.model().layout().h;
    Ok(def
        .provenance
        .lambda
        .rows
        .iter()
        .cloned()
        .chain(sub.h().basis().iter().map(|x| sparse::to_dense(x, hdim)))
        .collect())
}

fn spinor_map_with_sign(def: &FilteredDeformation, sign: &Rational) -> Result<NomizuMap, HomogError> {
    let module = def.graded_subalgebra()?.model().module();
    let beta = &def.provenance.beta_hat;
    let values = prescribed_so(def)?
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let r = module.rho_of(x);
            match beta.get(i) {
                Some(b) => r.add_scaled(sign, b),
                None => r,
            }
        })
        .collect();
    Ok(NomizuMap { values })
}

/// `Ψ(A + v) = ρ(A + λ(v)) + β̂(v, −)` as matrices on `S`.
pub fn spinor_nomizu_map(def: &FilteredDeformation) -> Result<NomizuMap, HomogError> {
    spinor_map_with_sign(def, &Rational::one())
}

/// `[X, w_j]` in the deformed algebra, as a vector of `S`.
fn bracket_with_spinor(def: &FilteredDeformation, x: usize, j: usize) -> Result<Option<SparseVec>, HomogError> {
    let sub = def.graded_subalgebra()?;
    let l = sub.layout();
    let s_range = l.v..l.v + l.s;
    let out = def.algebra.bracket_basis(x, l.si(j));
    if out.iter().any(|(k, _)| !s_range.contains(k)) {
        return Ok(None);
    }
    let mut coords = vec![Rational::zero(); l.s];
    for (k, c) in out {
        coords[k - l.v] = c.clone();
    }
    Ok(Some(sub.s_prime().combine(&coords)))
}

/// Indices of the `𝔤 = V ⊕ 𝔥` basis inside the full deformation basis.
fn even_indices(def: &FilteredDeformation) -> Result<Vec<usize>, HomogError> {
    let l = def.graded_subalgebra()?.layout();
    Ok((0..l.v).chain((0..l.h).map(|k| l.hi(k))).collect())
}

pub fn killing_spinor_check(def: &FilteredDeformation) -> Result<KillingSpinorReport, HomogError> {
    let sub = def.graded_subalgebra()?;
    let module = sub.model().module();
    let so = module.so_basis();
    let lc = nomizu_levi_civita(&MetricLiePair::from_deformation(def)?)?;
    let idx = even_indices(def)?;
    let w = sub.s_prime().basis();
    let mut tasks = Vec::new();
    for (i, &x) in idx.iter().enumerate() {
        let rho_l = module.rho_of(&so.coordinates(&lc.values[i])?);
        for (j, s) in w.iter().enumerate() {
            tasks.push((i, x, j, rho_l.clone(), s));
        }
    }
    let results: Vec<Result<bool, HomogError>> = tasks
        .par_iter()
        .map(|(i, x, j, rho_l, s)| {
            let Some(br) = bracket_with_spinor(def, *x, *j)? else { return Ok(false) };
            let lhs = sparse::axpy(&rho_l.mul_sparse_vec(s), &-Rational::one(), &br);
            let rhs = match def.provenance.beta_hat.get(*i) {
                Some(b) if *i < sub.layout().v => sparse::scale(&b.mul_sparse_vec(s), &-Rational::one()),
                _ => Vec::new(),
            };
            Ok(lhs == rhs)
        })
        .collect();
    let mut report = KillingSpinorReport { checked: tasks.len(), failures: 0, first: None };
    for ((i, _, j, _, _), r) in tasks.iter().zip(results) {
        if !r? {
            report.failures += 1;
            report.first.get_or_insert((*i, *j));
        }
    }
    Ok(report)
}

fn flatness_with_map(def: &FilteredDeformation, psi: &NomizuMap) -> Result<FlatnessReport, HomogError> {
    let sub = def.graded_subalgebra()?;
    let pair = MetricLiePair::from_deformation(def)?;
    let curvature = wang_curvature(psi, pair.algebra());
    let n = pair.dim();
    let w = sub.s_prime().basis();
    let mut report = FlatnessReport {
        checked: n * n * w.len(),
        failures: 0,
        first: None,
        flat_on_all_of_s: curvature.is_zero(),
    };
    for i in 0..n {
        for j in 0..n {
            let f = curvature.at(i, j);
            for (k, s) in w.iter().enumerate() {
                if !f.mul_sparse_vec(s).is_empty() {
                    report.failures += 1;
                    report.first.get_or_insert((i, j, k));
                }
            }
        }
    }
    Ok(report)
}

/// Wang curvature of the spinor connection, applied to `S′`.
pub fn spinor_connection_flatness(def: &FilteredDeformation) -> Result<FlatnessReport, HomogError> {
    flatness_with_map(def, &spinor_nomizu_map(def)?)
}

/// Summary of the Levi-Civita curvature.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurvatureSummary {
    pub nonzero_pairs: usize,
    pub skew: bool,
    pub vertical_failures: usize,
    pub bianchi_failures: usize,
    /// `c` with `R(u, w) = c·(u ∧ w)`, when the curvature has that form.
    pub constant_curvature: Option<Rational>,
}

/// Everything verified on the homogeneous model of a deformation.
#[derive(Clone, Debug, Serialize)]
pub struct Reconstruction {
    /// `L(e_i)` in `𝔰𝔬(V)` coordinates, shape `[dim 𝔤, dim 𝔰𝔬(V)]`.
    pub levi_civita: RationalTensor,
    /// Basis elements of `𝔤` where `L(A + v) ≠ A + λ(v)`.
    pub levi_civita_mismatches: Vec<usize>,
    pub curvature: CurvatureSummary,
    pub killing_spinor: KillingSpinorReport,
    pub flatness: FlatnessReport,
    /// The spinor identities are checked for the spinors coming from `S′` only.
    pub scope: &'static str,
}

impl Reconstruction {
    pub fn passed(&self) -> bool {
        self.levi_civita_mismatches.is_empty()
            && self.curvature.skew
            && self.curvature.vertical_failures == 0
            && self.curvature.bianchi_failures == 0
            && self.killing_spinor.passed()
            && self.flatness.passed()
    }
}

pub fn reconstruct(def: &FilteredDeformation) -> Result<Reconstruction, HomogError> {
    let pair = MetricLiePair::from_deformation(def)?;
    let lc = nomizu_levi_civita(&pair)?;
    let so = def.graded_subalgebra()?.model().module().so_basis();
    let mut levi_civita = RationalTensor::zeros(vec![pair.dim(), so.len()]);
    let mut levi_civita_mismatches = Vec::new();
    for (i, (m, expect)) in lc.values.iter().zip(prescribed_so(def)?).enumerate() {
        let coords = so.coordinates(m)?;
        if coords != expect {
            levi_civita_mismatches.push(i);
        }
        for (k, x) in coords.into_iter().enumerate() {
            if !x.is_zero() {
                levi_civita.set(vec![i, k], x)?;
            }
        }
    }
    let curvature = wang_curvature(&lc, pair.algebra());
    let n = pair.dim();
    let summary = CurvatureSummary {
        nonzero_pairs: (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| !curvature.at(i, j).is_zero()).count(),
        skew: curvature.is_skew(),
        vertical_failures: curvature.vertical_failures(pair.vdim()),
        bianchi_failures: first_bianchi_failures(&curvature, pair.vdim()),
        constant_curvature: constant_curvature(&curvature, pair.eta()),
    };
    Ok(Reconstruction {
        levi_civita,
        levi_civita_mismatches,
        curvature: summary,
        killing_spinor: killing_spinor_check(def)?,
        flatness: spinor_connection_flatness(def)?,
        scope: "spinors in S′ at the basepoint",
    })
}

/// Flatness with `β̂` replaced by a multiple of itself.
#[cfg(test)]
fn flatness_with_sign(def: &FilteredDeformation, sign: &Rational) -> FlatnessReport {
    flatness_with_map(def, &spinor_map_with_sign(def, sign).unwrap()).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::Signature;
    use crate::deform::{admissibility_check, clifford_cocycle, h_max, integrate, GradedSubalgebra};
    use crate::exactla::{q, Subspace};
    use crate::flatmodel::{FlatModel, Parity};
    use crate::homogmodel::LieCertificate;
    use crate::spencer::{normalized_cocycle_basis, NormalizedCocycle};
    use std::sync::Arc;

    fn model(p: usize, qq: usize, parity: Parity) -> Arc<FlatModel> {
        Arc::new(FlatModel::minimal(Signature::auto(p, qq).unwrap(), parity).unwrap())
    }

    fn sphere() -> FilteredDeformation {
        let m = model(0, 7, Parity::Skew);
        let x = clifford_cocycle(&m, &q(1, 2)).unwrap();
        integrate(&admissibility_check(&GradedSubalgebra::full(m), x, None).unwrap()).unwrap()
    }

    #[test]
    fn zero_deformation_is_flat() {
        let m = model(1, 3, Parity::Symmetric);
        let l = m.layout();
        let adm = admissibility_check(&GradedSubalgebra::full(m), NormalizedCocycle::zero(l.v, l.s, l.h), None).unwrap();
        let def = integrate(&adm).unwrap();
        let r = reconstruct(&def).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.curvature.nonzero_pairs, 0);
        assert!(r.flatness.flat_on_all_of_s);
        assert_eq!(r.curvature.constant_curvature, Some(Rational::zero()));
    }

    #[test]
    fn round_sphere_model() {
        let def = sphere();
        let cert = LieCertificate::of(&def.algebra);
        assert!(cert.is_compact_semisimple(), "{cert:?}");
        let r = reconstruct(&def).unwrap();
        assert!(r.passed(), "{r:?}");
        let c = r.curvature.constant_curvature.clone().expect("constant curvature");
        assert!(!c.is_zero());
        assert!(r.flatness.flat_on_all_of_s);
        // The even part is 𝔰𝔬(8), also compact semisimple.
        let pair = MetricLiePair::from_deformation(&def).unwrap();
        assert!(LieCertificate::of(pair.algebra()).is_compact_semisimple());
        // Both signs of the Killing constant are flat on the round sphere; a
        // doubled constant is not.
        assert!(flatness_with_sign(&def, &-Rational::one()).passed());
        assert!(!flatness_with_sign(&def, &Rational::from_int(2)).passed());
    }

    #[test]
    fn truncated_sphere_and_toy_models() {
        let m = model(0, 7, Parity::Skew);
        let x = clifford_cocycle(&m, &q(1, 2)).unwrap();
        let l = m.layout();
        let sp = Subspace::from_spanning(l.s, &(0..6).map(|i| vec![(i, Rational::one())]).collect::<Vec<_>>());
        let h = h_max(&m, &sp, &x.beta).unwrap();
        let sub = GradedSubalgebra::build(m.clone(), Subspace::full(l.v), sp, h).unwrap();
        let def = integrate(&admissibility_check(&sub, x, None).unwrap()).unwrap();
        let r = reconstruct(&def).unwrap();
        assert!(r.passed(), "{r:?}");

        let m = model(1, 3, Parity::Symmetric);
        let l = m.layout();
        let mut built = 0;
        for x in normalized_cocycle_basis(&m) {
            let h = h_max(&m, &Subspace::full(l.s), &x.beta).unwrap();
            let sub = GradedSubalgebra::build(m.clone(), Subspace::full(l.v), Subspace::full(l.s), h).unwrap();
            if let Ok(adm) = admissibility_check(&sub, x, None) {
                let def = integrate(&adm).unwrap();
                let r = reconstruct(&def).unwrap();
                assert!(r.passed(), "{r:?}");
                built += 1;
            }
        }
        assert!(built > 0);
    }
}
