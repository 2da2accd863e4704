//! Integration of admissible cocycles into filtered deformations.
//!
//! `Θ(v, s, t) = γ̂([v,s], t) + γ̂(s, [v,t]) − [λ(v), γ̂(s,t)]` with
//! `[v,s] = β̂(v,s) + λ(v)·s`, which is the polarization of
//! `2γ̂(s, β̂(v,s)) − (λ(v)·γ̂)(s,s)`. When `Θ` kills `V ⊗ 𝔇` it factors as
//! `θ̃(v, κ(s,t)) = Θ(v,s,t)`, and `θ̃` is computed through a section `Σ`.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::admissible::{admissibility_check, AdmissibleData, LambdaMap};
use super::dirac::{DiracKernel, Section};
use super::equations::{check_full_cocycle, check_theta_system, EquationReport, GeneralPresentation};
use super::subalgebra::{kappa_of, GradedSubalgebra};
use super::{DeformError, ObstructionKind};
use crate::exactla::{sparse, Rational, RationalTensor, SparseMatrix, SparseVec, Subspace};
use crate::flatmodel::{FlatModel, FlatModelRecord, Parity, SuperAlgebra};
use crate::spencer::{act_on_beta, ad_matrix, NormalizedCocycle};

/// Serializable description of a graded subalgebra.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubalgebraRecord {
    pub model: FlatModelRecord,
    pub v_prime: Subspace,
    pub s_prime: Subspace,
    pub h: Subspace,
}

impl From<&GradedSubalgebra> for SubalgebraRecord {
    fn from(sub: &GradedSubalgebra) -> Self {
        SubalgebraRecord {
            model: FlatModelRecord::from(sub.model()),
            v_prime: sub.v_prime().clone(),
            s_prime: sub.s_prime().clone(),
            h: sub.h().clone(),
        }
    }
}

impl SubalgebraRecord {
    pub fn rebuild(&self) -> Result<GradedSubalgebra, DeformError> {
        let model = std::sync::Arc::new(self.model.rebuild()?);
        GradedSubalgebra::build(model, self.v_prime.clone(), self.s_prime.clone(), self.h.clone())
    }
}

/// The data a deformation was integrated from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub beta_hat: Vec<SparseMatrix>,
    pub gamma_hat: Vec<SparseMatrix>,
    pub lambda: LambdaMap,
    pub section: Section,
    /// `θ̃(e_a, e_b)` in `𝔰𝔬(V)` coordinates, shape `[V, V, 𝔰𝔬(V)]`.
    pub theta_tilde: RationalTensor,
}

impl Provenance {
    pub fn cocycle(&self) -> NormalizedCocycle {
        NormalizedCocycle { beta: self.beta_hat.clone(), gamma: self.gamma_hat.clone() }
    }

    pub fn theta_table(&self) -> ThetaTable {
        let sh = self.theta_tilde.shape();
        let mut t = ThetaTable::zero(sh[0], sh[2]);
        for (idx, x) in self.theta_tilde.entries() {
            t.entries[idx[0] * sh[0] + idx[1]][idx[2]] = x.clone();
        }
        t
    }
}

/// `θ̃(e_a, e_b)` for all basis pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaTable {
    pub vdim: usize,
    pub hdim: usize,
    pub entries: Vec<Vec<Rational>>,
}

impl ThetaTable {
    fn zero(vdim: usize, hdim: usize) -> Self {
        ThetaTable { vdim, hdim, entries: vec![vec![Rational::zero(); hdim]; vdim * vdim] }
    }

    pub fn at(&self, a: usize, b: usize) -> &[Rational] {
        &self.entries[a * self.vdim + b]
    }

    /// `θ̃(x, y)` for sparse vectors.
    pub fn eval(&self, x: &[(usize, Rational)], y: &[(usize, Rational)]) -> Vec<Rational> {
        let mut acc = vec![Rational::zero(); self.hdim];
        for (a, xa) in x {
            for (b, yb) in y {
                let c = xa * yb;
                for (z, t) in acc.iter_mut().zip(self.at(*a, *b)) {
                    if !t.is_zero() {
                        *z += &c * t;
                    }
                }
            }
        }
        acc
    }

    fn to_tensor(&self) -> RationalTensor {
        let mut t = RationalTensor::zeros(vec![self.vdim, self.vdim, self.hdim]);
        for a in 0..self.vdim {
            for b in 0..self.vdim {
                for (k, x) in self.at(a, b).iter().enumerate() {
                    if !x.is_zero() {
                        t.set(vec![a, b, k], x.clone()).expect("in range");
                    }
                }
            }
        }
        t
    }
}

/// Identities satisfied by `θ̃`; each field counts failing basis tuples.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct InvarianceReport {
    pub theta_h_invariance: usize,
    pub bianchi: usize,
    /// The Bianchi identity in the form `θ̃(v,w)κ(p) = Θ(v,p)w − Θ(w,p)v`.
    pub bianchi_from_theta: usize,
    pub lambda_bianchi: usize,
    pub theta_lambda_in_h: usize,
}

impl InvarianceReport {
    pub fn passed(&self) -> bool {
        *self == InvarianceReport::default()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegrationReport {
    pub dirac_kernel_dim: usize,
    pub section_independent: bool,
    /// `θ̃(v, v) = 0` for `v = κ` of basis pairs and of sampled spinors.
    pub theta_alternating_sampled: bool,
    /// `θ̃(e_a, e_b) + θ̃(e_b, e_a) = 0` for all basis pairs.
    pub theta_alternating_pairwise: bool,
    pub jacobi_violations: usize,
    pub full_cocycle: EquationReport,
    pub theta_system: EquationReport,
    pub invariance: InvarianceReport,
    pub associated_graded_matches: bool,
    pub degree_zero_matches: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reintegration_matches: Option<bool>,
}

impl IntegrationReport {
    pub fn passed(&self) -> bool {
        self.section_independent
            && self.theta_alternating_sampled
            && self.theta_alternating_pairwise
            && self.jacobi_violations == 0
            && self.full_cocycle.passed()
            && self.theta_system.passed()
            && self.invariance.passed()
            && self.associated_graded_matches
            && self.degree_zero_matches
            && self.reintegration_matches != Some(false)
    }
}

/// A filtered deformation of `V ⊕ S′ ⊕ 𝔥` with its provenance.
#[derive(Debug, Serialize, Deserialize)]
pub struct FilteredDeformation {
    pub subalgebra: SubalgebraRecord,
    pub algebra: SuperAlgebra,
    pub provenance: Provenance,
    #[serde(skip_deserializing)]
    pub report: Option<IntegrationReport>,
    #[serde(skip)]
    cached: OnceLock<GradedSubalgebra>,
}

impl Clone for FilteredDeformation {
    fn clone(&self) -> Self {
        let cached = OnceLock::new();
        if let Some(s) = self.cached.get() {
            let _ = cached.set(s.clone());
        }
        FilteredDeformation {
            subalgebra: self.subalgebra.clone(),
            algebra: self.algebra.clone(),
            provenance: self.provenance.clone(),
            report: self.report.clone(),
            cached,
        }
    }
}

impl FilteredDeformation {
    /// The subalgebra, rebuilt from its record on first use.
    pub fn graded_subalgebra(&self) -> Result<&GradedSubalgebra, DeformError> {
        if let Some(s) = self.cached.get() {
            return Ok(s);
        }
        let s = self.subalgebra.rebuild()?;
        Ok(self.cached.get_or_init(|| s))
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn presentation(&self) -> Result<GeneralPresentation, DeformError> {
        GeneralPresentation::from_algebra(self.graded_subalgebra()?.layout(), &self.algebra)
    }
}

/// Per-model data shared by the integration steps.
struct Workspace<'a> {
    sub: &'a GradedSubalgebra,
    model: &'a FlatModel,
    cocycle: &'a NormalizedCocycle,
    kernel: &'a DiracKernel,
    /// `gw[k][l] = G_k w_l`.
    gw: Vec<Vec<SparseVec>>,
    lambda_mats: Vec<SparseMatrix>,
    lambda_rho: Vec<SparseMatrix>,
    lambda_ad: Vec<SparseMatrix>,
}

impl<'a> Workspace<'a> {
    fn new(
        sub: &'a GradedSubalgebra,
        cocycle: &'a NormalizedCocycle,
        lambda: &'a LambdaMap,
        kernel: &'a DiracKernel,
    ) -> Result<Self, DeformError> {
        let model = sub.model();
        let so = model.module().so_basis();
        let w = sub.s_prime().basis();
        let gw = cocycle.gamma.iter().map(|g| w.iter().map(|s| g.mul_sparse_vec(s)).collect()).collect();
        let lambda_mats: Vec<SparseMatrix> = lambda.rows.iter().map(|x| so.to_matrix(x)).collect();
        let lambda_rho = lambda.rows.iter().map(|x| model.module().rho_of(x)).collect();
        let lambda_ad = lambda_mats.iter().map(|m| ad_matrix(model, m)).collect::<Result<_, _>>()?;
        Ok(Workspace { sub, model, cocycle, kernel, gw, lambda_mats, lambda_rho, lambda_ad })
    }

    fn skew(&self) -> bool {
        self.model.parity() == Parity::Skew
    }

    /// `γ̂(x, w_l)`.
    fn gamma_with_basis(&self, x: &[(usize, Rational)], l: usize) -> Vec<Rational> {
        self.gw.iter().map(|g| sparse::dot(x, &g[l])).collect()
    }

    /// `[e_a, w_j] = β̂(e_a, w_j) + λ(e_a)·w_j` in `S`.
    fn odd_action(&self, a: usize, j: usize) -> SparseVec {
        let s = &self.sub.s_prime().basis()[j];
        sparse::axpy(&self.cocycle.beta[a].mul_sparse_vec(s), &Rational::one(), &self.lambda_rho[a].mul_sparse_vec(s))
    }

    /// `Θ(e_a, pair)` for every pair, in `𝔰𝔬(V)` coordinates.
    fn theta_row(&self, a: usize) -> Vec<Vec<Rational>> {
        let w = self.sub.s_prime().basis();
        let u: Vec<SparseVec> = (0..w.len()).map(|j| self.odd_action(a, j)).collect();
        let sign = if self.skew() { -Rational::one() } else { Rational::one() };
        self.kernel
            .pairs
            .pairs()
            .iter()
            .map(|&(j, l)| {
                let g1 = self.gamma_with_basis(&u[j], l);
                let g2 = self.gamma_with_basis(&u[l], j);
                let g0 = sparse::from_dense(&self.gamma_with_basis(&w[j], l));
                let ad = self.lambda_ad[a].mul_sparse_vec(&g0);
                let mut out: Vec<Rational> = g1.iter().zip(&g2).map(|(x, y)| x + &(&sign * y)).collect();
                for (k, x) in ad {
                    out[k] -= &x;
                }
                out
            })
            .collect()
    }

    fn theta_big(&self) -> Vec<Vec<Vec<Rational>>> {
        (0..self.model.layout().v).into_par_iter().map(|a| self.theta_row(a)).collect()
    }
}

fn combine_pairs(row: &[Vec<Rational>], x: &[(usize, Rational)], hdim: usize) -> Vec<Rational> {
    let mut acc = vec![Rational::zero(); hdim];
    for (p, c) in x {
        for (z, t) in acc.iter_mut().zip(&row[*p]) {
            if !t.is_zero() {
                *z += c * t;
            }
        }
    }
    acc
}

fn factor_theta(big: &[Vec<Vec<Rational>>], section: &Section, hdim: usize) -> ThetaTable {
    let n = big.len();
    let mut t = ThetaTable::zero(n, hdim);
    for a in 0..n {
        for b in 0..n {
            t.entries[a * n + b] = combine_pairs(&big[a], section.of(b), hdim);
        }
    }
    t
}

fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Rational::is_zero)
}

/// Integrates an admissible cocycle with its canonical `λ`.
pub fn integrate(adm: &AdmissibleData) -> Result<FilteredDeformation, DeformError> {
    let sub = &adm.subalgebra;
    let model = sub.model();
    let so = model.module().so_basis();
    let l = model.layout();
    let hdim = l.h;
    let w = sub.s_prime().basis();
    let ws = Workspace::new(sub, &adm.cocycle, &adm.lambda, &adm.kernel)?;

    // Θ on V ⊗ ⊙²S′ and the Dirac kernel gate.
    let big = ws.theta_big();
    for (a, row) in big.iter().enumerate() {
        for (i, d) in adm.kernel.basis.iter().enumerate() {
            if !is_zero_vec(&combine_pairs(row, d, hdim)) {
                return Err(DeformError::obstructed(
                    ObstructionKind::DiracKernelNotAnnihilated,
                    vec![a, i],
                    format!("Θ(e_{a}, d_{i}) ≠ 0"),
                ));
            }
        }
    }

    // θ̃ through Σ, and again through a shifted section.
    let theta = factor_theta(&big, &adm.section, hdim);
    let section_independent = if adm.kernel.dim() == 0 {
        true
    } else {
        let coeffs: Vec<Vec<Rational>> = (0..l.v)
            .map(|a| (0..adm.kernel.dim()).map(|i| Rational::from_int(i64::from(i == a % adm.kernel.dim()))).collect())
            .collect();
        let other = adm.section.shifted(&adm.kernel, &coeffs);
        other.splits(&adm.kernel) && factor_theta(&big, &other, hdim) == theta
    };

    // Alternation, by sampling θ̃(κ, κ) and by the pairwise check.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut samples: Vec<SparseVec> = adm
        .kernel
        .pairs
        .pairs()
        .iter()
        .map(|&(j, k)| kappa_of(model, &w[j], &w[k]))
        .collect();
    for _ in 0..16 {
        let mut rand_spinor = || -> SparseVec {
            let coeffs: Vec<Rational> = (0..w.len()).map(|_| Rational::from_int(rng.gen_range(-3..=3))).collect();
            sub.s_prime().combine(&coeffs)
        };
        let s = rand_spinor();
        let t = if ws.skew() { rand_spinor() } else { s.clone() };
        samples.push(kappa_of(model, &s, &t));
    }
    if let Some(i) = samples.iter().position(|v| !is_zero_vec(&theta.eval(v, v))) {
        return Err(DeformError::obstructed(
            ObstructionKind::ThetaNotAlternating,
            vec![i],
            format!("θ̃(v, v) ≠ 0 for sample {i}"),
        ));
    }
    for a in 0..l.v {
        for b in a..l.v {
            let sum: Vec<Rational> = theta.at(a, b).iter().zip(theta.at(b, a)).map(|(x, y)| x + y).collect();
            if !is_zero_vec(&sum) {
                return Err(DeformError::obstructed(
                    ObstructionKind::ThetaNotAlternating,
                    vec![a, b],
                    format!("θ̃(e_{a}, e_{b}) + θ̃(e_{b}, e_{a}) ≠ 0"),
                ));
            }
        }
    }

    // θ̃(v,w)·s against the quadratic expression in β̂ and λ.
    let lambda_on_beta: Vec<Vec<SparseMatrix>> = (0..l.v)
        .map(|a| act_on_beta(&ws.lambda_mats[a], &ws.lambda_rho[a], &adm.cocycle.beta))
        .collect();
    let beta = &adm.cocycle.beta;
    for a in 0..l.v {
        for b in a + 1..l.v {
            let rho_theta = model.module().rho_of(theta.at(a, b));
            for (j, s) in w.iter().enumerate() {
                let lhs = rho_theta.mul_sparse_vec(s);
                let mut rhs = beta[a].mul_sparse_vec(&beta[b].mul_sparse_vec(s));
                rhs = sparse::axpy(&rhs, &-Rational::one(), &beta[b].mul_sparse_vec(&beta[a].mul_sparse_vec(s)));
                rhs = sparse::axpy(&rhs, &Rational::one(), &lambda_on_beta[a][b].mul_sparse_vec(s));
                rhs = sparse::axpy(&rhs, &-Rational::one(), &lambda_on_beta[b][a].mul_sparse_vec(s));
                if lhs != rhs {
                    return Err(DeformError::obstructed(
                        ObstructionKind::ThetaActionMismatch,
                        vec![a, b, j],
                        format!("θ̃(e_{a}, e_{b})·w_{j} disagrees"),
                    ));
                }
            }
        }
    }

    // Brackets on V ⊕ S′ ⊕ 𝔥.
    let sl = sub.layout();
    let mut alg = sub.graded_algebra();
    let h_coords = |x: &[Rational], what: &'static str, witness: Vec<usize>| -> Result<Vec<Rational>, DeformError> {
        sub.h().coordinates(&sparse::from_dense(x)).ok_or(DeformError::Membership { what, witness })
    };
    let lift = |coords: &[Rational], at: &dyn Fn(usize) -> usize| -> SparseVec {
        sparse::from_dense(coords).into_iter().map(|(i, x)| (at(i), x)).collect()
    };
    let v_coords = |v: &SparseVec| sub.v_coords(v).ok_or(DeformError::Membership { what: "V′", witness: Vec::new() });
    for (k, a_mat) in sub.h_matrices().iter().enumerate() {
        for b in 0..sl.v {
            let vb = &sub.v_prime().basis()[b];
            let lb = adm.lambda.apply(vb);
            let comm = so.coordinates(&a_mat.commutator(&so.to_matrix(&lb)))?;
            let l_av = adm.lambda.apply(&a_mat.mul_sparse_vec(vb));
            let d: Vec<Rational> = comm.iter().zip(&l_av).map(|(x, y)| x - y).collect();
            let c = h_coords(&d, "[A, λ(v)] − λ(Av) ∈ 𝔥", vec![k, b])?;
            alg.add_bracket(sl.hi(k), sl.vi(b), &lift(&c, &|i| sl.hi(i)));
        }
    }
    for &(j, k) in adm.kernel.pairs.pairs() {
        let kap = kappa_of(model, &w[j], &w[k]);
        let g = adm.cocycle.gamma_eval(&w[j], &w[k]);
        let lk = adm.lambda.apply(&kap);
        let d: Vec<Rational> = g.iter().zip(&lk).map(|(x, y)| x - y).collect();
        let c = h_coords(&d, "γ̂ − λ∘κ ∈ 𝔥", vec![j, k])?;
        alg.add_bracket(sl.si(j), sl.si(k), &lift(&c, &|i| sl.hi(i)));
    }
    for a in 0..sl.v {
        let va = &sub.v_prime().basis()[a];
        let la = so.to_matrix(&adm.lambda.apply(va));
        let rho_la = model.module().rho_of(&adm.lambda.apply(va));
        for (j, s) in w.iter().enumerate() {
            let img = sparse::axpy(
                &ws.cocycle_beta_on(va, s),
                &Rational::one(),
                &rho_la.mul_sparse_vec(s),
            );
            let c = sub.s_coords(&img).ok_or(DeformError::obstructed(
                ObstructionKind::SectionCondition,
                vec![a, j],
                "[v, s] leaves S′",
            ))?;
            alg.add_bracket(sl.vi(a), sl.si(j), &lift(&c, &|i| sl.si(i)));
        }
        for b in a + 1..sl.v {
            let vb = &sub.v_prime().basis()[b];
            let lb = so.to_matrix(&adm.lambda.apply(vb));
            let alpha = sparse::axpy(&la.mul_sparse_vec(vb), &-Rational::one(), &lb.mul_sparse_vec(va));
            let t = theta.eval(va, vb);
            let l_alpha = adm.lambda.apply(&alpha);
            let comm = so.coordinates(&la.commutator(&lb))?;
            let d: Vec<Rational> = t.iter().zip(&l_alpha).zip(&comm).map(|((x, y), z)| &(x - y) + z).collect();
            let hc = h_coords(&d, "θ̃ − λ∘α + [λ, λ] ∈ 𝔥", vec![a, b])?;
            let mut val = lift(&v_coords(&alpha)?, &|i| sl.vi(i));
            val.extend(lift(&hc, &|i| sl.hi(i)));
            alg.add_bracket(sl.vi(a), sl.vi(b), &sparse::normalize(val));
        }
    }

    // Independent oracle.
    let violations = alg.super_jacobi_check();
    if let Some(first) = violations.first() {
        return Err(DeformError::JacobiOracleFailure { count: violations.len(), first: first.triple });
    }

    let provenance = Provenance {
        beta_hat: adm.cocycle.beta.clone(),
        gamma_hat: adm.cocycle.gamma.clone(),
        lambda: adm.lambda.clone(),
        section: adm.section.clone(),
        theta_tilde: theta.to_tensor(),
    };
    let cached = OnceLock::new();
    let _ = cached.set(sub.clone());
    let mut def = FilteredDeformation {
        subalgebra: SubalgebraRecord::from(sub),
        algebra: alg,
        provenance,
        report: None,
        cached,
    };
    let mut report = verification_report(&def, adm.kernel.dim())?;
    report.section_independent = section_independent;
    def.report = Some(report);
    Ok(def)
}

impl Workspace<'_> {
    fn cocycle_beta_on(&self, v: &[(usize, Rational)], s: &[(usize, Rational)]) -> SparseVec {
        let mut acc: SparseVec = Vec::new();
        for (a, c) in v {
            acc = sparse::axpy(&acc, c, &self.cocycle.beta[*a].mul_sparse_vec(s));
        }
        acc
    }
}

/// Integrates with `λ` replaced by another map differing from `γ̂∘Σ` by a map `V → 𝔥`.
pub fn integrate_with_lambda(adm: &AdmissibleData, lambda: LambdaMap) -> Result<FilteredDeformation, DeformError> {
    integrate(&adm.with_lambda(lambda)?)
}

/// Oracle checks on a deformation, independent of how it was built.
fn verification_report(def: &FilteredDeformation, dirac_kernel_dim: usize) -> Result<IntegrationReport, DeformError> {
    let sub = def.graded_subalgebra()?;
    let pres = def.presentation()?;
    let graded = sub.graded_algebra();
    let sl = sub.layout();
    let degree_zero_matches = (0..sl.h).all(|k| {
        (0..sl.h).all(|m| def.algebra.bracket_basis(sl.hi(k), sl.hi(m)) == graded.bracket_basis(sl.hi(k), sl.hi(m)))
    });
    let theta = def.provenance.theta_table();
    let pairwise = (0..theta.vdim).all(|a| {
        (0..theta.vdim).all(|b| theta.at(a, b).iter().zip(theta.at(b, a)).all(|(x, y)| (x + y).is_zero()))
    });
    Ok(IntegrationReport {
        dirac_kernel_dim,
        section_independent: true,
        theta_alternating_sampled: true,
        theta_alternating_pairwise: pairwise,
        jacobi_violations: def.algebra.super_jacobi_check().len(),
        full_cocycle: check_full_cocycle(&pres),
        theta_system: check_theta_system(&pres),
        invariance: deformation_invariance_checks(def)?,
        associated_graded_matches: pres.graded == graded,
        degree_zero_matches,
        reintegration_matches: None,
    })
}

/// Re-checks a deformation read from disk: rebuilds the subalgebra,
/// re-integrates its provenance and runs every oracle on the stored bracket.
pub fn verify(def: &FilteredDeformation) -> Result<IntegrationReport, DeformError> {
    let sub = def.graded_subalgebra()?;
    let adm = admissibility_check(sub, def.provenance.cocycle(), Some(def.provenance.section.clone()))?;
    let adm = adm.with_lambda(def.provenance.lambda.clone())?;
    let again = integrate(&adm)?;
    let mut report = verification_report(def, adm.kernel.dim())?;
    report.section_independent = again.report.as_ref().is_some_and(|r| r.section_independent);
    report.reintegration_matches = Some(again.algebra == def.algebra && again.provenance == def.provenance);
    Ok(report)
}

/// `𝔥`-invariance of `θ̃`, the Bianchi identity by two routes, the
/// `λ`-Bianchi identity and the membership `θ̃ − λ∘α + [λ, λ] ∈ 𝔥`.
pub fn deformation_invariance_checks(def: &FilteredDeformation) -> Result<InvarianceReport, DeformError> {
    let sub = def.graded_subalgebra()?;
    let model = sub.model();
    let so = model.module().so_basis();
    let n = model.layout().v;
    let theta = def.provenance.theta_table();
    let lambda = &def.provenance.lambda;
    let e = |a: usize| -> SparseVec { vec![(a, Rational::one())] };
    let mat = |x: &[Rational]| so.to_matrix(x);
    let coords = |m: &SparseMatrix| so.coordinates(m).expect("skew");
    let sub_vec = |x: &[Rational], y: &[Rational]| -> Vec<Rational> { x.iter().zip(y).map(|(p, q)| p - q).collect() };
    let mut report = InvarianceReport::default();

    // (A·θ̃)(e_a, e_b) = [A, θ̃(a,b)] − θ̃(Ae_a, e_b) − θ̃(e_a, Ae_b).
    let act_theta = |a_mat: &SparseMatrix, a: usize, b: usize| -> Vec<Rational> {
        let c = coords(&a_mat.commutator(&mat(theta.at(a, b))));
        let t1 = theta.eval(&a_mat.column(a), &e(b));
        let t2 = theta.eval(&e(a), &a_mat.column(b));
        sub_vec(&sub_vec(&c, &t1), &t2)
    };
    for a_mat in sub.h_matrices() {
        for a in 0..n {
            for b in a + 1..n {
                if !is_zero_vec(&act_theta(a_mat, a, b)) {
                    report.theta_h_invariance += 1;
                }
            }
        }
    }

    let lambda_mats: Vec<SparseMatrix> = lambda.rows.iter().map(|x| mat(x)).collect();
    for u in 0..n {
        for v in u + 1..n {
            for w in v + 1..n {
                let mut acc: SparseVec = Vec::new();
                for (x, y, z) in [(u, v, w), (v, w, u), (w, u, v)] {
                    acc = sparse::axpy(&acc, &Rational::one(), &mat(theta.at(x, y)).column(z));
                }
                if !acc.is_empty() {
                    report.bianchi += 1;
                }
                let mut acc = vec![Rational::zero(); so.len()];
                for (x, y, z) in [(u, v, w), (v, w, u), (w, u, v)] {
                    for (p, q) in acc.iter_mut().zip(act_theta(&lambda_mats[x], y, z)) {
                        *p += &q;
                    }
                }
                if !is_zero_vec(&acc) {
                    report.lambda_bianchi += 1;
                }
            }
        }
    }

    // θ̃(v,w)κ(p) = Θ(v,p)w − Θ(w,p)v with Θ recomputed from β̂, γ̂, λ.
    let kernel = super::dirac::dirac_kernel(sub);
    let cocycle = def.provenance.cocycle();
    let ws = Workspace::new(sub, &cocycle, lambda, &kernel)?;
    let big = ws.theta_big();
    let w = sub.s_prime().basis();
    for a in 0..n {
        for b in a + 1..n {
            let t = mat(theta.at(a, b));
            for (p, &(j, k)) in kernel.pairs.pairs().iter().enumerate() {
                let lhs = t.mul_sparse_vec(&kappa_of(model, &w[j], &w[k]));
                let rhs = sparse::axpy(&mat(&big[a][p]).column(b), &-Rational::one(), &mat(&big[b][p]).column(a));
                if lhs != rhs {
                    report.bianchi_from_theta += 1;
                }
            }
        }
    }

    for a in 0..n {
        for b in a + 1..n {
            let alpha = lambda.alpha(model, a, b);
            let comm = coords(&lambda_mats[a].commutator(&lambda_mats[b]));
            let d: Vec<Rational> = theta
                .at(a, b)
                .iter()
                .zip(lambda.apply(&alpha))
                .zip(&comm)
                .map(|((x, y), z)| &(x - &y) + z)
                .collect();
            if !sub.h().contains(&sparse::from_dense(&d)) {
                report.theta_lambda_in_h += 1;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::Signature;
    use crate::deform::{admissible::clifford_cocycle, h_max, integrate};
    use crate::exactla::q;
    use crate::spencer::{invariants_under, normalized_cocycle_basis, restriction_and_kernel};
    use std::sync::Arc;

    fn model(p: usize, qq: usize, parity: Parity) -> Arc<FlatModel> {
        Arc::new(FlatModel::minimal(Signature::auto(p, qq).unwrap(), parity).unwrap())
    }

    /// `S′` spanned by the first `d` basis spinors and `𝔥 = 𝔥ᵐᵃˣ(S′, β)`.
    fn truncated(m: &Arc<FlatModel>, d: usize, beta: &[SparseMatrix]) -> GradedSubalgebra {
        let l = m.layout();
        let sp = Subspace::from_spanning(l.s, &(0..d).map(|i| vec![(i, Rational::one())]).collect::<Vec<_>>());
        let h = h_max(m, &sp, beta).unwrap();
        GradedSubalgebra::build(m.clone(), Subspace::full(l.v), sp, h).unwrap()
    }

    #[test]
    fn zero_cocycle_gives_graded_algebra() {
        for (p, qq, parity) in [(1, 3, Parity::Symmetric), (0, 7, Parity::Skew), (1, 2, Parity::Symmetric)] {
            let m = model(p, qq, parity);
            let l = m.layout();
            let sub = GradedSubalgebra::full(m.clone());
            let adm = admissibility_check(&sub, NormalizedCocycle::zero(l.v, l.s, l.h), None).unwrap();
            let def = integrate(&adm).unwrap();
            assert_eq!(def.algebra, *m.algebra());
            assert!(def.algebra.super_jacobi_check().is_empty());
            assert!(def.report.as_ref().unwrap().passed());
        }
    }

    #[test]
    fn round_sphere_integrates() {
        let m = model(0, 7, Parity::Skew);
        let x = clifford_cocycle(&m, &q(1, 2)).unwrap();
        let adm = admissibility_check(&GradedSubalgebra::full(m), x, None).unwrap();
        let def = integrate(&adm).unwrap();
        assert_eq!(def.dim(), 36);
        let r = def.report.as_ref().unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.dirac_kernel_dim, 21);
        assert!(def.provenance.theta_tilde.entries().next().is_some());
    }

    #[test]
    fn theta_is_section_independent() {
        let m = model(0, 7, Parity::Skew);
        let x = clifford_cocycle(&m, &q(1, 2)).unwrap();
        for d in [8, 7] {
            let sub = truncated(&m, d, &x.beta);
            let adm = admissibility_check(&sub, x.clone(), None).unwrap();
            let base = integrate(&adm).unwrap();
            let coeffs: Vec<Vec<Rational>> = (0..7)
                .map(|a| (0..adm.kernel.dim()).map(|i| Rational::from_int(((a + 2 * i) % 3) as i64 - 1)).collect())
                .collect();
            let other = adm.section.shifted(&adm.kernel, &coeffs);
            assert_ne!(other, adm.section);
            let again = integrate(&adm.with_section(other).unwrap()).unwrap();
            assert_eq!(again.provenance.theta_tilde, base.provenance.theta_tilde);
        }
    }

    #[test]
    fn kernel_shift_leaves_brackets_unchanged() {
        let m = model(0, 7, Parity::Skew);
        let x = clifford_cocycle(&m, &q(1, 2)).unwrap();
        let basis = normalized_cocycle_basis(&m);
        for d in [7, 6, 5] {
            let sub = truncated(&m, d, &x.beta);
            let r = restriction_and_kernel(&basis, sub.s_prime(), Parity::Skew).unwrap();
            let shifts = invariants_under(&m, sub.h_matrices(), &r.kernel_elements).unwrap();
            assert!(!shifts.is_empty());
            let base = integrate(&admissibility_check(&sub, x.clone(), None).unwrap()).unwrap();
            assert_eq!(base.dim(), 7 + d + sub.h().dim());
            for k in &shifts {
                let shifted = integrate(&admissibility_check(&sub, x.add(k), None).unwrap()).unwrap();
                assert_eq!(shifted.algebra, base.algebra);
                assert_eq!(shifted.provenance.theta_tilde, base.provenance.theta_tilde);
            }
        }
    }

    #[test]
    fn lambda_shift_into_h_keeps_theta() {
        let m = model(0, 7, Parity::Skew);
        let x = clifford_cocycle(&m, &q(1, 2)).unwrap();
        let sub = truncated(&m, 7, &x.beta);
        let adm = admissibility_check(&sub, x, None).unwrap();
        let base = integrate(&adm).unwrap();
        let mut lambda = adm.lambda.clone();
        let h0 = sparse::to_dense(&sub.h().basis()[0], m.layout().h);
        for (z, y) in lambda.rows[2].iter_mut().zip(&h0) {
            *z += y;
        }
        let def = integrate_with_lambda(&adm, lambda).unwrap();
        assert_eq!(def.provenance.theta_tilde, base.provenance.theta_tilde);
        assert!(def.report.as_ref().unwrap().passed());
        let mut bad = adm.lambda.clone();
        bad.rows[0][0] += Rational::one();
        if !sub.h().contains(&[(0, Rational::one())]) {
            assert!(matches!(integrate_with_lambda(&adm, bad), Err(DeformError::Membership { .. })));
        }
    }

    #[test]
    fn toy_four_dimensional_deformations() {
        let m = model(1, 3, Parity::Symmetric);
        let l = m.layout();
        let mut built = 0;
        for x in normalized_cocycle_basis(&m) {
            let sub = truncated(&m, l.s, &x.beta);
            match admissibility_check(&sub, x, None) {
                Ok(adm) => {
                    let def = integrate(&adm).unwrap();
                    assert!(def.report.as_ref().unwrap().passed());
                    built += 1;
                }
                Err(e) => assert!(e.obstruction().is_some(), "{e}"),
            }
        }
        assert!(built > 0);
    }

    #[test]
    fn perturbed_presentations_fail_their_equations() {
        let m = model(0, 7, Parity::Skew);
        let x = clifford_cocycle(&m, &q(1, 2)).unwrap();
        let def = integrate(&admissibility_check(&GradedSubalgebra::full(m), x, None).unwrap()).unwrap();
        let pres = def.presentation().unwrap();
        let l = pres.layout;
        let mut p = pres.clone();
        p.degree_two.add_bracket(l.hi(0), l.vi(0), &[(l.hi(1), Rational::one())]);
        assert!(check_full_cocycle(&p).failures("delta_cocycle") > 0);
        let mut p = pres.clone();
        let cur = p.degree_four.bracket_basis(l.vi(0), l.vi(1)).clone();
        p.degree_four.add_bracket(l.vi(0), l.vi(1), &sparse::scale(&cur, &Rational::from_int(-2)));
        assert!(check_theta_system(&p).failures("jacobi_222a") > 0);
    }

    #[test]
    fn serialized_deformation_verifies() {
        let m = model(0, 7, Parity::Skew);
        let x = clifford_cocycle(&m, &q(1, 2)).unwrap();
        let sub = truncated(&m, 6, &x.beta);
        let def = integrate(&admissibility_check(&sub, x, None).unwrap()).unwrap();
        let text = serde_json::to_string(&def).unwrap();
        let back: FilteredDeformation = serde_json::from_str(&text).unwrap();
        assert_eq!(back.algebra, def.algebra);
        assert_eq!(back.provenance, def.provenance);
        let r = verify(&back).unwrap();
        assert_eq!(r.reintegration_matches, Some(true));
        assert!(r.passed());
    }
}
