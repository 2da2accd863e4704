//! Nomizu maps, the Levi-Civita one, and their Wang curvatures.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{HomogError, MetricLiePair};
use crate::exactla::{Rational, SparseMatrix};
use crate::flatmodel::SuperAlgebra;

/// A linear map `Ψ: 𝔤 → 𝔨` given by the matrices of `Ψ` on the basis of `𝔤`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NomizuMap {
    pub values: Vec<SparseMatrix>,
}

impl NomizuMap {
    /// `Ψ(x)` for a sparse vector of `𝔤`.
    pub fn apply(&self, x: &[(usize, Rational)]) -> SparseMatrix {
        let n = self.values.first().map_or(0, SparseMatrix::nrows);
        x.iter().fold(SparseMatrix::zeros(n, n), |acc, (k, c)| acc.add_scaled(c, &self.values[*k]))
    }
}

/// `F(e_i, e_j) = [Ψ(e_i), Ψ(e_j)] − Ψ([e_i, e_j])` for all basis pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Curvature {
    n: usize,
    values: Vec<SparseMatrix>,
}

impl Curvature {
    pub fn at(&self, i: usize, j: usize) -> &SparseMatrix {
        &self.values[i * self.n + j]
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(SparseMatrix::is_zero)
    }

    pub fn is_skew(&self) -> bool {
        (0..self.n).all(|i| (i..self.n).all(|j| self.at(i, j).add(self.at(j, i)).is_zero()))
    }

    /// Pairs `(i, j)` with `i` in `𝔥` (index at least `vdim`) and `F ≠ 0`;
    /// these vanish exactly when `Ψ` is `𝔥`-equivariant.
    pub fn vertical_failures(&self, vdim: usize) -> usize {
        (vdim..self.n).map(|i| (0..self.n).filter(|&j| !self.at(i, j).is_zero()).count()).sum()
    }
}

/// The Levi-Civita Nomizu map `L: 𝔤 → 𝔰𝔬(V)` of a metric Lie pair.
///
/// `L̃(X)Y = ½[X,Y]‾ + U(X,Y)` with `2η(U(X,Y), v) = ⟨X,[v,Y]⟩ + ⟨[v,X],Y⟩`.
/// Checks that `L̃(X)` kills `𝔥`, is skew for `η`, restricts to the isotropy
/// action on `𝔥` and is torsion-free.
pub fn nomizu_levi_civita(pair: &MetricLiePair) -> Result<NomizuMap, HomogError> {
    let n = pair.dim();
    let v = pair.vdim();
    let alg = pair.algebra();
    let half = Rational::new(1, 2);
    let e = |i: usize| vec![(i, Rational::one())];
    let table: Vec<Vec<Vec<Rational>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut out = vec![Rational::zero(); v];
                    for (a, x) in alg.bracket_basis(i, j) {
                        if *a < v {
                            out[*a] += &half * x;
                        }
                    }
                    for (c, z) in out.iter_mut().enumerate() {
                        let t = pair.pairing(&e(i), alg.bracket_basis(c, j)) + pair.pairing(alg.bracket_basis(c, i), &e(j));
                        if !t.is_zero() {
                            *z += t * (Rational::from_int(2) * &pair.eta()[c]).recip();
                        }
                    }
                    out
                })
                .collect()
        })
        .collect();
    let fail = |what: &'static str, i: usize, j: usize| HomogError::WellDefinednessFailure { what, witness: (i, j) };
    for i in 0..n {
        for j in v..n {
            if table[i][j].iter().any(|x| !x.is_zero()) {
                return Err(fail("L̃(X) vanishing on 𝔥", i, j));
            }
        }
        for j in 0..n {
            let bracket = pair.project(alg.bracket_basis(i, j));
            let mut t: Vec<Rational> = table[i][j].iter().zip(&table[j][i]).map(|(x, y)| x - y).collect();
            for (a, x) in bracket {
                t[a] -= x;
            }
            if t.iter().any(|x| !x.is_zero()) {
                return Err(fail("torsion-freeness", i, j));
            }
        }
    }
    let values: Vec<SparseMatrix> = (0..n)
        .map(|i| {
            let rows = (0..v).map(|a| (0..v).map(|b| table[i][b][a].clone()).collect()).collect::<Vec<Vec<_>>>();
            SparseMatrix::from_dense(&rows, v)
        })
        .collect();
    let eta = pair.eta();
    for (i, m) in values.iter().enumerate() {
        for a in 0..v {
            for b in a..v {
                if &eta[a] * &m.get(a, b) + &eta[b] * &m.get(b, a) != Rational::zero() {
                    return Err(fail("metric compatibility", i, a * v + b));
                }
            }
        }
    }
    for (k, m) in values.iter().enumerate().skip(v) {
        if *m != SparseMatrix::from_dense(&pair.isotropy(k), v) {
            return Err(fail("agreement with the isotropy action", k, k));
        }
    }
    Ok(NomizuMap { values })
}

/// Wang curvature of a Nomizu map with respect to the bracket of `𝔤`.
pub fn wang_curvature(psi: &NomizuMap, algebra: &SuperAlgebra) -> Curvature {
    let n = algebra.dim();
    let values = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            psi.values[i].commutator(&psi.values[j]).sub(&psi.apply(algebra.bracket_basis(i, j)))
        })
        .collect();
    Curvature { n, values }
}

/// Triples `u < v < w` in `V` where `F(u,v)w + F(v,w)u + F(w,u)v ≠ 0`.
pub fn first_bianchi_failures(curvature: &Curvature, vdim: usize) -> usize {
    let mut failures = 0;
    for u in 0..vdim {
        for v in u + 1..vdim {
            for w in v + 1..vdim {
                let cyc = [(u, v, w), (v, w, u), (w, u, v)]
                    .iter()
                    .fold(SparseMatrix::zeros(vdim, 1), |acc, &(x, y, z)| {
                        acc.add(&SparseMatrix::from_columns(vdim, &[curvature.at(x, y).column(z)]))
                    });
                if !cyc.is_zero() {
                    failures += 1;
                }
            }
        }
    }
    failures
}

/// The constant `c` with `F(e_a, e_b) = c·(e_a ∧ e_b)` on `V`, where
/// `(u ∧ w)x = η(w,x)u − η(u,x)w`, if such a constant exists.
pub fn constant_curvature(curvature: &Curvature, eta: &[Rational]) -> Option<Rational> {
    let v = eta.len();
    if v < 2 {
        return None;
    }
    let wedge = |a: usize, b: usize| {
        SparseMatrix::from_triplets(v, v, vec![(a, b, eta[b].clone()), (b, a, -&eta[a])])
    };
    let c = curvature.at(0, 1).get(0, 1) * eta[1].recip();
    for a in 0..v {
        for b in a + 1..v {
            if *curvature.at(a, b) != wedge(a, b).scale(&c) {
                return None;
            }
        }
    }
    Some(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abelian_pair_has_zero_connection_and_curvature() {
        let pair = MetricLiePair::abelian(vec![Rational::one(), -Rational::one(), -Rational::one()]).unwrap();
        let l = nomizu_levi_civita(&pair).unwrap();
        assert!(l.values.iter().all(SparseMatrix::is_zero));
        let f = wang_curvature(&l, pair.algebra());
        assert!(f.is_zero());
        assert_eq!(constant_curvature(&f, pair.eta()), Some(Rational::zero()));
    }

    /// `V ⊕ 𝔰𝔬(2)` with `[e_0, e_1] = −r·A`, `A e_0 = e_1`, `A e_1 = −e_0`:
    /// a round sphere for `r < 0`, a hyperbolic plane for `r > 0`.
    fn rank_one_symmetric(r: i64) -> MetricLiePair {
        let one = Rational::one();
        let mut alg = SuperAlgebra::new(vec![-2, -2, 0], vec![false; 3]);
        alg.set_bracket(2, 0, vec![(1, one.clone())]);
        alg.set_bracket(2, 1, vec![(0, -one.clone())]);
        alg.set_bracket(0, 1, vec![(2, Rational::from_int(-r))]);
        MetricLiePair::new(alg, 2, vec![one.clone(), one]).unwrap()
    }

    #[test]
    fn rank_one_symmetric_spaces_have_constant_curvature() {
        for r in [1, -1, 3] {
            let pair = rank_one_symmetric(r);
            let l = nomizu_levi_civita(&pair).unwrap();
            assert!(l.values[0].is_zero() && l.values[1].is_zero());
            let f = wang_curvature(&l, pair.algebra());
            assert!(f.is_skew());
            assert_eq!(f.vertical_failures(2), 0);
            // F(e_0,e_1) = −L([e_0,e_1]) = r·A, and A = −(e_0 ∧ e_1) for η = 1.
            assert_eq!(constant_curvature(&f, pair.eta()), Some(Rational::from_int(-r)));
        }
    }

    #[test]
    fn torsion_and_bianchi_on_a_solvable_pair() {
        // 𝔤 = V with [e_0, e_1] = e_1 (hyperbolic plane as a Lie group).
        let mut alg = SuperAlgebra::new(vec![-2, -2], vec![false; 2]);
        alg.set_bracket(0, 1, vec![(1, Rational::one())]);
        let pair = MetricLiePair::new(alg, 2, vec![Rational::one(), Rational::one()]).unwrap();
        let l = nomizu_levi_civita(&pair).unwrap();
        let f = wang_curvature(&l, pair.algebra());
        assert_eq!(first_bianchi_failures(&f, 2), 0);
        assert_eq!(constant_curvature(&f, pair.eta()), Some(Rational::from_int(-1)));
    }
}
