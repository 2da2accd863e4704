//! Normalized degree-(2,2) cocycles `β + γ` of a flat model.
//!
//! The unknowns are the entries of `β: V ⊗ S → S`. The `V⊗⊙²S` cocycle
//! condition fixes `γ(s,t)v = −κ(β(v,s),t) − κ(s,β(v,t))` and requires the
//! right-hand side to be `η`-skew in `v`; the `⊙³S` condition is the cyclic
//! identity `Σ β(κ(s,t),u) + γ(s,t)u = 0`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::complex::{CochainSpace, Host};
use super::SpencerError;
use crate::exactla::{kernel_basis, sparse, Rational, SparseMatrix, SparseVec, Subspace};
use crate::flatmodel::{FlatModel, Parity};

/// `β(e_a, s) = beta[a]·s` and `γ(s,t) = Σ_k (sᵀ gamma[k] t) E_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedCocycle {
    pub beta: Vec<SparseMatrix>,
    pub gamma: Vec<SparseMatrix>,
}

impl NormalizedCocycle {
    pub fn zero(vdim: usize, sdim: usize, hdim: usize) -> Self {
        NormalizedCocycle {
            beta: vec![SparseMatrix::zeros(sdim, sdim); vdim],
            gamma: vec![SparseMatrix::zeros(sdim, sdim); hdim],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.beta.iter().chain(&self.gamma).all(SparseMatrix::is_zero)
    }

    pub fn sdim(&self) -> usize {
        self.beta.first().map_or(0, SparseMatrix::nrows)
    }

    /// `Σ cᵢ xᵢ`.
    pub fn combine(coeffs: &[Rational], elems: &[NormalizedCocycle]) -> NormalizedCocycle {
        let first = &elems[0];
        let mut acc = NormalizedCocycle::zero(first.beta.len(), first.sdim(), first.gamma.len());
        for (c, e) in coeffs.iter().zip(elems) {
            if c.is_zero() {
                continue;
            }
            for (x, y) in acc.beta.iter_mut().zip(&e.beta) {
                *x = x.add_scaled(c, y);
            }
            for (x, y) in acc.gamma.iter_mut().zip(&e.gamma) {
                *x = x.add_scaled(c, y);
            }
        }
        acc
    }

    pub fn add(&self, other: &NormalizedCocycle) -> NormalizedCocycle {
        NormalizedCocycle::combine(&[Rational::one(), Rational::one()], &[self.clone(), other.clone()])
    }

    /// `γ(s, t)` in `𝔰𝔬(V)` coordinates.
    pub fn gamma_eval(&self, s: &[(usize, Rational)], t: &[(usize, Rational)]) -> Vec<Rational> {
        self.gamma
            .iter()
            .map(|g| sparse::dot(s, &g.mul_sparse_vec(t)))
            .collect()
    }

    /// Coordinates in `C^{2,2}` of the host built from the same flat model.
    pub fn to_cochain(&self, host: &Host, space: &CochainSpace) -> SparseVec {
        let l = host.layout;
        let odd = host.algebra.is_odd(l.si(0));
        let mut out = Vec::new();
        for (a, b) in self.beta.iter().enumerate() {
            let bt = b.transpose();
            for i in 0..l.s {
                let tuple = [l.vi(a) as u32, l.si(i) as u32];
                for (m, x) in bt.row(i) {
                    out.push((space.index(&tuple, l.si(*m)).expect("cochain basis"), x.clone()));
                }
            }
        }
        for (k, g) in self.gamma.iter().enumerate() {
            for (i, row) in g.rows().iter().enumerate() {
                for (t, x) in row {
                    if *t < i || (*t == i && !odd) {
                        continue;
                    }
                    let tuple = [l.si(i) as u32, l.si(*t) as u32];
                    out.push((space.index(&tuple, l.hi(k)).expect("cochain basis"), x.clone()));
                }
            }
        }
        sparse::normalize(out)
    }
}

/// The linear system whose solutions are the normalized cocycles.
#[derive(Debug)]
pub struct NormalizedSystem {
    vdim: usize,
    sdim: usize,
    hdim: usize,
    parity: Parity,
    /// `gamma_lin[pair(i,t)][k]`: `γ_k(s_i, s_t)` as a linear form in `β`, for `i ≤ t`.
    gamma_lin: Vec<Vec<SparseVec>>,
    constraints: SparseMatrix,
}

fn pair_index(i: usize, t: usize, n: usize) -> usize {
    debug_assert!(i <= t);
    i * n - i * (i + 1) / 2 + t
}

impl NormalizedSystem {
    pub fn new(model: &FlatModel) -> Self {
        let module = model.module();
        let so = module.so_basis();
        let sig = *model.signature();
        let (vdim, sdim, hdim) = (sig.dim(), module.dim(), so.len());
        let parity = model.parity();
        let kappa = &model.kappa().components;
        let kappa_t: Vec<SparseMatrix> = kappa.iter().map(SparseMatrix::transpose).collect();
        let unknown = |a: usize, m: usize, i: usize| (a * sdim + m) * sdim + i;
        let one = Rational::one();

        // P(e_b; s_i, s_t)^a as a linear form in β.
        let p_lin = |b: usize, a: usize, i: usize, t: usize| -> SparseVec {
            let mut acc: Vec<(usize, Rational)> = Vec::new();
            for (j, c) in kappa_t[a].row(t) {
                acc.push((unknown(b, *j, i), c.clone()));
            }
            for (j, c) in kappa[a].row(i) {
                acc.push((unknown(b, *j, t), c.clone()));
            }
            sparse::normalize(acc)
        };

        let pairs: Vec<(usize, usize)> = (0..sdim).flat_map(|i| (i..sdim).map(move |t| (i, t))).collect();
        let gamma_lin: Vec<Vec<SparseVec>> = pairs
            .par_iter()
            .map(|&(i, t)| {
                so.pairs()
                    .iter()
                    .map(|&(a, b)| sparse::scale(&p_lin(b, a, i, t), &Rational::from_int(-sig.eta(b))))
                    .collect()
            })
            .collect();

        let strict = parity == Parity::Skew;
        let mut rows: Vec<SparseVec> = pairs
            .par_iter()
            .filter(|(i, t)| !(strict && i == t))
            .flat_map_iter(|&(i, t)| {
                let p_lin = &p_lin;
                (0..vdim).flat_map(move |a| {
                    (a..vdim).map(move |b| {
                        sparse::axpy(
                            &sparse::scale(&p_lin(b, a, i, t), &Rational::from_int(sig.eta(a))),
                            &Rational::from_int(sig.eta(b)),
                            &p_lin(a, b, i, t),
                        )
                    })
                })
            })
            .filter(|r| !r.is_empty())
            .collect();

        // Columns of ρ(E_k) by spinor index.
        let rho_cols: Vec<Vec<(usize, usize, Rational)>> = {
            let mut cols = vec![Vec::new(); sdim];
            for k in 0..hdim {
                for (m, row) in module.rho(k).rows().iter().enumerate() {
                    for (z, x) in row {
                        cols[*z].push((k, m, x.clone()));
                    }
                }
            }
            cols
        };
        let gamma_at = |x: usize, y: usize, k: usize| -> SparseVec {
            if x <= y {
                gamma_lin[pair_index(x, y, sdim)][k].clone()
            } else if strict {
                sparse::scale(&gamma_lin[pair_index(y, x, sdim)][k], &-one.clone())
            } else {
                gamma_lin[pair_index(y, x, sdim)][k].clone()
            }
        };
        let triples: Vec<(usize, usize, usize)> = (0..sdim)
            .flat_map(|i| {
                let s0 = if strict { i + 1 } else { i };
                (s0..sdim).flat_map(move |t| {
                    let s1 = if strict { t + 1 } else { t };
                    (s1..sdim).map(move |u| (i, t, u))
                })
            })
            .collect();
        let cyclic_rows: Vec<SparseVec> = triples
            .par_iter()
            .flat_map_iter(|&(i, t, u)| {
                let mut acc: BTreeMap<usize, BTreeMap<usize, Rational>> = BTreeMap::new();
                for (x, y, z) in [(i, t, u), (t, u, i), (u, i, t)] {
                    for (a, k) in kappa.iter().enumerate() {
                        let c = k.get(x, y);
                        if c.is_zero() {
                            continue;
                        }
                        for m in 0..sdim {
                            *acc.entry(m).or_default().entry(unknown(a, m, z)).or_default() += &c;
                        }
                    }
                    for (k, m, r) in &rho_cols[z] {
                        for (col, g) in gamma_at(x, y, *k) {
                            *acc.entry(*m).or_default().entry(col).or_default() += r * &g;
                        }
                    }
                }
                acc.into_values()
                    .map(|row| row.into_iter().filter(|(_, v)| !v.is_zero()).collect::<SparseVec>())
                    .filter(|r| !r.is_empty())
                    .collect::<Vec<_>>()
            })
            .collect();
        rows.extend(cyclic_rows);
        let constraints = SparseMatrix::from_normalized_rows(vdim * sdim * sdim, rows);
        NormalizedSystem { vdim, sdim, hdim, parity, gamma_lin, constraints }
    }

    pub fn num_unknowns(&self) -> usize {
        self.vdim * self.sdim * self.sdim
    }

    pub fn constraints(&self) -> &SparseMatrix {
        &self.constraints
    }

    pub fn beta_to_vec(&self, beta: &[SparseMatrix]) -> SparseVec {
        let mut out = Vec::new();
        for (a, b) in beta.iter().enumerate() {
            for (m, row) in b.rows().iter().enumerate() {
                for (i, x) in row {
                    out.push(((a * self.sdim + m) * self.sdim + i, x.clone()));
                }
            }
        }
        out
    }

    pub fn vec_to_beta(&self, x: &[(usize, Rational)]) -> Vec<SparseMatrix> {
        let s2 = self.sdim * self.sdim;
        let mut trip: Vec<Vec<(usize, usize, Rational)>> = vec![Vec::new(); self.vdim];
        for (u, c) in x {
            trip[u / s2].push(((u % s2) / self.sdim, u % self.sdim, c.clone()));
        }
        trip.into_iter()
            .map(|t| SparseMatrix::from_triplets(self.sdim, self.sdim, t))
            .collect()
    }

    /// The `γ` forced by `β` through the `V⊗⊙²S` condition.
    pub fn gamma_for(&self, beta: &[SparseMatrix]) -> Vec<SparseMatrix> {
        let x = self.beta_to_vec(beta);
        let n = self.sdim;
        let mut trip: Vec<Vec<(usize, usize, Rational)>> = vec![Vec::new(); self.hdim];
        for i in 0..n {
            for t in i..n {
                if self.parity == Parity::Skew && i == t {
                    continue;
                }
                for (k, lin) in self.gamma_lin[pair_index(i, t, n)].iter().enumerate() {
                    let v = sparse::dot(lin, &x);
                    if v.is_zero() {
                        continue;
                    }
                    if i != t {
                        let w = if self.parity == Parity::Skew { -v.clone() } else { v.clone() };
                        trip[k].push((t, i, w));
                    }
                    trip[k].push((i, t, v));
                }
            }
        }
        trip.into_iter().map(|t| SparseMatrix::from_triplets(n, n, t)).collect()
    }

    /// Whether `β` (with its forced `γ`) is a cocycle.
    pub fn is_cocycle(&self, beta: &[SparseMatrix]) -> bool {
        self.constraints.mul_sparse_vec(&self.beta_to_vec(beta)).is_empty()
    }

    /// Completes `β` into a normalized cocycle, if it is one.
    pub fn complete(&self, beta: Vec<SparseMatrix>) -> Result<NormalizedCocycle, SpencerError> {
        if !self.is_cocycle(&beta) {
            return Err(SpencerError::NotCocycle);
        }
        let gamma = self.gamma_for(&beta);
        Ok(NormalizedCocycle { beta, gamma })
    }

    /// Echelon basis of the space of normalized cocycles.
    pub fn basis(&self) -> Vec<NormalizedCocycle> {
        kernel_basis(&self.constraints)
            .into_basis()
            .par_iter()
            .map(|x| {
                let beta = self.vec_to_beta(x);
                let gamma = self.gamma_for(&beta);
                NormalizedCocycle { beta, gamma }
            })
            .collect()
    }
}

/// Basis of the normalized cocycles of a flat model.
pub fn normalized_cocycle_basis(model: &FlatModel) -> Vec<NormalizedCocycle> {
    NormalizedSystem::new(model).basis()
}

/// `A·β` for `A ∈ 𝔰𝔬(V)` given as a matrix on `V` and `ρ(A)` on `S`.
pub fn act_on_beta(a: &SparseMatrix, rho: &SparseMatrix, beta: &[SparseMatrix]) -> Vec<SparseMatrix> {
    let at = a.transpose();
    (0..beta.len())
        .map(|c| {
            let mut m = rho.mul(&beta[c]).sub(&beta[c].mul(rho));
            for (b, x) in at.row(c) {
                m = m.add_scaled(&-x.clone(), &beta[*b]);
            }
            m
        })
        .collect()
}

/// `A·γ`, with `ad` the matrix of `ad_A` in the `𝔰𝔬(V)` basis.
pub fn act_on_gamma(ad: &SparseMatrix, rho: &SparseMatrix, gamma: &[SparseMatrix]) -> Vec<SparseMatrix> {
    let rho_t = rho.transpose();
    (0..gamma.len())
        .map(|l| {
            let mut m = rho_t.mul(&gamma[l]).add(&gamma[l].mul(rho)).neg();
            for (k, x) in ad.row(l) {
                m = m.add_scaled(x, &gamma[*k]);
            }
            m
        })
        .collect()
}

/// Matrix of `ad_A` on `𝔰𝔬(V)`.
pub fn ad_matrix(model: &FlatModel, a: &SparseMatrix) -> Result<SparseMatrix, SpencerError> {
    let so = model.module().so_basis();
    let cols = so
        .matrices()
        .iter()
        .map(|e| Ok(sparse::from_dense(&so.coordinates(&a.commutator(e))?)))
        .collect::<Result<Vec<_>, SpencerError>>()?;
    Ok(SparseMatrix::from_columns(so.len(), &cols))
}

/// The `𝔥`-invariant part of the span of `space`, for `𝔥` spanned by the
/// matrices `h`. Invariance is imposed on `β` alone; invariance of `γ` is
/// then checked on every resulting element.
pub fn invariants_under(
    model: &FlatModel,
    h: &[SparseMatrix],
    space: &[NormalizedCocycle],
) -> Result<Vec<NormalizedCocycle>, SpencerError> {
    if space.is_empty() || h.is_empty() {
        return Ok(space.to_vec());
    }
    let so = model.module().so_basis();
    let flat_len = space[0].beta.len() * space[0].sdim() * space[0].sdim();
    let sys_vec = |beta: &[SparseMatrix]| -> SparseVec {
        let s = space[0].sdim();
        let mut out = Vec::new();
        for (a, b) in beta.iter().enumerate() {
            for (m, row) in b.rows().iter().enumerate() {
                for (i, x) in row {
                    out.push(((a * s + m) * s + i, x.clone()));
                }
            }
        }
        out
    };
    let mut actions = Vec::with_capacity(h.len());
    let mut columns: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); space.len()];
    for (ai, a) in h.iter().enumerate() {
        let rho = model.module().rho_of(&so.coordinates(a)?);
        for (j, x) in space.iter().enumerate() {
            let img = sys_vec(&act_on_beta(a, &rho, &x.beta));
            columns[j].extend(img.into_iter().map(|(r, v)| (ai * flat_len + r, v)));
        }
        actions.push((ad_matrix(model, a)?, rho));
    }
    let m = SparseMatrix::from_columns(h.len() * flat_len, &columns);
    let kernel = kernel_basis(&m);
    let out: Vec<NormalizedCocycle> = kernel
        .basis()
        .iter()
        .map(|c| NormalizedCocycle::combine(&sparse::to_dense(c, space.len()), space))
        .collect();
    for x in &out {
        for (ad, rho) in &actions {
            if act_on_gamma(ad, rho, &x.gamma).iter().any(|g| !g.is_zero()) {
                return Err(SpencerError::GammaNotInvariant);
            }
        }
    }
    Ok(out)
}

/// Restriction of normalized cocycles to `V ⊗ S′` and `⊙²S′`, and the
/// cocycles whose `β` vanishes on `V ⊗ S′`.
#[derive(Clone, Debug)]
pub struct Restriction {
    /// Columns: restrictions of the input cocycles; rows: `β` block then `γ` block.
    pub matrix: SparseMatrix,
    pub beta_rows: usize,
    /// Kernel of the `β` block, in coordinates of the input cocycles.
    pub kernel: Subspace,
    pub kernel_elements: Vec<NormalizedCocycle>,
}

pub fn restriction_and_kernel(
    space: &[NormalizedCocycle],
    s_prime: &Subspace,
    parity: Parity,
) -> Result<Restriction, SpencerError> {
    let w = s_prime.basis();
    let cols: Vec<(SparseVec, SparseVec)> = space
        .iter()
        .map(|x| {
            let sdim = x.sdim();
            let mut beta_part = Vec::new();
            let mut off = 0;
            for b in &x.beta {
                for wj in w {
                    for (m, v) in b.mul_sparse_vec(wj) {
                        beta_part.push((off + m, v));
                    }
                    off += sdim;
                }
            }
            let mut gamma_part = Vec::new();
            let mut off = 0;
            for j in 0..w.len() {
                let start = if parity == Parity::Skew { j + 1 } else { j };
                for l in start..w.len() {
                    for (k, v) in x.gamma_eval(&w[j], &w[l]).into_iter().enumerate() {
                        if !v.is_zero() {
                            gamma_part.push((off + k, v));
                        }
                    }
                    off += x.gamma.len();
                }
            }
            (beta_part, gamma_part)
        })
        .collect();
    let (vdim, sdim, hdim) = space
        .first()
        .map_or((0, 0, 0), |x| (x.beta.len(), x.sdim(), x.gamma.len()));
    let m = w.len();
    let beta_rows = vdim * m * sdim;
    let npairs = if parity == Parity::Skew { m * m.saturating_sub(1) / 2 } else { m * (m + 1) / 2 };
    let gamma_rows = npairs * hdim;
    let beta_block = SparseMatrix::from_columns(
        beta_rows,
        &cols.iter().map(|(b, _)| b.clone()).collect::<Vec<_>>(),
    );
    let full_cols: Vec<SparseVec> = cols
        .iter()
        .map(|(b, g)| {
            let mut v = b.clone();
            v.extend(g.iter().map(|(r, x)| (beta_rows + r, x.clone())));
            v
        })
        .collect();
    let matrix = SparseMatrix::from_columns(beta_rows + gamma_rows, &full_cols);
    let kernel = if space.is_empty() { Subspace::zero(0) } else { kernel_basis(&beta_block) };
    let kernel_elements: Vec<NormalizedCocycle> = kernel
        .basis()
        .iter()
        .map(|c| NormalizedCocycle::combine(&sparse::to_dense(c, space.len()), space))
        .collect();
    for c in kernel.basis() {
        let image = matrix.mul_sparse_vec(c);
        if image.iter().any(|(r, _)| *r >= beta_rows) {
            return Err(SpencerError::RestrictionMismatch);
        }
    }
    Ok(Restriction { matrix, beta_rows, kernel, kernel_elements })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::Signature;
    use crate::spencer::SpencerComplex;

    fn model(p: usize, q: usize, parity: Parity) -> FlatModel {
        FlatModel::minimal(Signature::auto(p, q).unwrap(), parity).unwrap()
    }

    /// Evaluates both cocycle conditions with dense arithmetic on all basis inputs.
    fn conditions_hold(m: &FlatModel, x: &NormalizedCocycle) -> bool {
        let module = m.module();
        let so = module.so_basis();
        let n = module.dim();
        let vdim = m.signature().dim();
        let e = |i: usize| sparse::to_dense(&[(i, Rational::one())], n);
        let kappa = m.kappa();
        let beta = |a: usize, s: &[Rational]| x.beta[a].mul_vec(s);
        let gamma_mat = |s: &[Rational], t: &[Rational]| {
            let c = x.gamma_eval(&sparse::from_dense(s), &sparse::from_dense(t));
            so.to_matrix(&c)
        };
        let rho_of = |c: &[Rational]| module.rho_of(c);
        for i in 0..n {
            for t in 0..n {
                let (s, u) = (e(i), e(t));
                let g = gamma_mat(&s, &u);
                for a in 0..vdim {
                    // κ(β(v,s),t) + κ(s,β(v,t)) + γ(s,t)v = 0
                    let lhs1 = kappa.eval(&beta(a, &s), &u);
                    let lhs2 = kappa.eval(&s, &beta(a, &u));
                    let gv = g.mul_vec(&sparse::to_dense(&[(a, Rational::one())], vdim));
                    let sum: Vec<Rational> = (0..vdim).map(|c| &(&lhs1[c] + &lhs2[c]) + &gv[c]).collect();
                    if sum.iter().any(|z| !z.is_zero()) {
                        return false;
                    }
                }
                for w in 0..n {
                    // Cyclic identity on (s_i, s_t, s_w).
                    let trip = [e(i), e(t), e(w)];
                    let mut acc = vec![Rational::zero(); n];
                    for (x0, y0, z0) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
                        let k = kappa.eval(&trip[x0], &trip[y0]);
                        for (a, ka) in k.iter().enumerate() {
                            for (r, val) in beta(a, &trip[z0]).iter().enumerate() {
                                acc[r] += ka * val;
                            }
                        }
                        let c = x.gamma_eval(&sparse::from_dense(&trip[x0]), &sparse::from_dense(&trip[y0]));
                        for (r, val) in rho_of(&c).mul_vec(&trip[z0]).iter().enumerate() {
                            acc[r] += val;
                        }
                    }
                    if acc.iter().any(|z| !z.is_zero()) {
                        return false;
                    }
                }
            }
        }
        true
    }

    #[test]
    fn normalized_route_matches_raw_cohomology() {
        for (p, q, parity) in [(1, 3, Parity::Symmetric), (1, 2, Parity::Symmetric), (1, 3, Parity::Skew), (0, 3, Parity::Skew)] {
            let m = model(p, q, parity);
            let basis = normalized_cocycle_basis(&m);
            let c = SpencerComplex::new(Host::from_flat(&m), 2, 2);
            let h = c.cohomology(2, true);
            assert_eq!(basis.len(), h.dim_h, "({p},{q}) {parity:?}");
            let z = h.z_basis.unwrap();
            let b = h.b_basis.unwrap();
            let vecs: Vec<SparseVec> = basis.iter().map(|x| x.to_cochain(c.host(), c.space(2))).collect();
            for (x, v) in basis.iter().zip(&vecs) {
                assert!(z.contains(v));
                assert!(c.differential(2).mul_sparse_vec(v).is_empty());
                assert!(conditions_hold(&m, x));
            }
            let hn = Subspace::from_spanning(c.space(2).dim(), &vecs);
            assert_eq!(hn.dim(), basis.len());
            assert_eq!(hn.sum(&b).unwrap().dim(), z.dim());
        }
    }

    #[test]
    fn zero_beta_gives_zero_gamma() {
        let m = model(1, 3, Parity::Symmetric);
        let sys = NormalizedSystem::new(&m);
        let g = sys.gamma_for(&vec![SparseMatrix::zeros(4, 4); 4]);
        assert!(g.iter().all(SparseMatrix::is_zero));
    }

    #[test]
    fn full_so_invariants_and_trivial_subalgebra() {
        let m = model(1, 3, Parity::Symmetric);
        let basis = normalized_cocycle_basis(&m);
        assert_eq!(invariants_under(&m, &[], &basis).unwrap().len(), basis.len());
        let h = m.module().so_basis().matrices().to_vec();
        let inv = invariants_under(&m, &h, &basis).unwrap();
        for x in &inv {
            for a in &h {
                let rho = m.module().rho_of(&m.module().so_basis().coordinates(a).unwrap());
                assert!(act_on_beta(a, &rho, &x.beta).iter().all(SparseMatrix::is_zero));
            }
        }
    }

    #[test]
    fn restriction_to_everything_is_injective() {
        let m = model(1, 3, Parity::Symmetric);
        let basis = normalized_cocycle_basis(&m);
        let r = restriction_and_kernel(&basis, &Subspace::full(4), Parity::Symmetric).unwrap();
        assert_eq!(r.kernel.dim(), 0);
    }
}
