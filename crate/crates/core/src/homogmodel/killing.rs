//! Killing forms, their inertia, centers and derived algebras.

use serde::Serialize;

use crate::exactla::{rank, Rational, SparseMatrix, SparseVec};
use crate::flatmodel::SuperAlgebra;

/// Sign counts of a symmetric bilinear form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl Inertia {
    pub fn is_definite(&self) -> bool {
        self.zero == 0 && (self.positive == 0 || self.negative == 0)
    }
}

fn ad(algebra: &SuperAlgebra, i: usize) -> SparseMatrix {
    let n = algebra.dim();
    let cols: Vec<SparseVec> = (0..n).map(|j| algebra.bracket_basis(i, j).clone()).collect();
    SparseMatrix::from_columns(n, &cols)
}

/// `B(e_i, e_j) = tr(ad e_i ∘ ad e_j)`.
pub fn killing_form(algebra: &SuperAlgebra) -> Vec<Vec<Rational>> {
    let n = algebra.dim();
    let ads: Vec<SparseMatrix> = (0..n).map(|i| ad(algebra, i)).collect();
    let mut b = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let t: Rational = ads[i].triplets().map(|(p, q, x)| x * &ads[j].get(q, p)).sum();
            b[j][i] = t.clone();
            b[i][j] = t;
        }
    }
    b
}

/// Inertia of a symmetric matrix by symmetric elimination (`LDLᵀ` with
/// pivoting), exact over `ℚ`.
pub fn inertia(form: &[Vec<Rational>]) -> Inertia {
    let n = form.len();
    let mut a = form.to_vec();
    let mut out = Inertia { positive: 0, negative: 0, zero: 0 };
    let swap = |a: &mut Vec<Vec<Rational>>, p: usize, k: usize| {
        a.swap(p, k);
        for row in a.iter_mut() {
            row.swap(p, k);
        }
    };
    for k in 0..n {
        if let Some(p) = (k..n).find(|&p| !a[p][p].is_zero()) {
            swap(&mut a, p, k);
        } else if let Some((p, q)) = (k..n).flat_map(|p| (p + 1..n).map(move |q| (p, q))).find(|&(p, q)| !a[p][q].is_zero()) {
            // Row and column q added to p makes the (p, p) entry 2·a[p][q].
            for j in 0..n {
                let x = a[q][j].clone();
                a[p][j] += x;
            }
            for row in a.iter_mut() {
                let x = row[q].clone();
                row[p] += x;
            }
            swap(&mut a, p, k);
        } else {
            out.zero += n - k;
            break;
        }
        let d = a[k][k].clone();
        if d.signum() > 0 {
            out.positive += 1;
        } else {
            out.negative += 1;
        }
        for i in k + 1..n {
            let f = &a[i][k] / &d;
            if f.is_zero() {
                continue;
            }
            for j in k..n {
                let x = &f * &a[k][j];
                a[i][j] -= x;
            }
            for row in a.iter_mut().skip(k) {
                let x = &f * &row[k];
                row[i] -= x;
            }
        }
    }
    out
}

/// Dimension of `{x : [x, 𝔤] = 0}`.
pub fn center_dim(algebra: &SuperAlgebra) -> usize {
    let n = algebra.dim();
    let mut trip = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for (c, x) in algebra.bracket_basis(i, j) {
                trip.push((j * n + c, i, x.clone()));
            }
        }
    }
    n - rank(&SparseMatrix::from_triplets(n * n, n, trip))
}

/// Dimension of `[𝔤, 𝔤]`.
pub fn derived_dim(algebra: &SuperAlgebra) -> usize {
    let n = algebra.dim();
    let cols: Vec<SparseVec> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).map(|(i, j)| algebra.bracket_basis(i, j).clone()).collect();
    rank(&SparseMatrix::from_columns(n, &cols))
}

/// Invariants identifying a Lie algebra up to the checks listed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LieCertificate {
    pub dim: usize,
    pub killing: Inertia,
    pub center_dim: usize,
    pub derived_dim: usize,
    pub jacobi_violations: usize,
}

impl LieCertificate {
    pub fn of(algebra: &SuperAlgebra) -> Self {
        LieCertificate {
            dim: algebra.dim(),
            killing: inertia(&killing_form(algebra)),
            center_dim: center_dim(algebra),
            derived_dim: derived_dim(algebra),
            jacobi_violations: algebra.super_jacobi_check().len(),
        }
    }

    /// Semisimple with negative definite Killing form.
    pub fn is_compact_semisimple(&self) -> bool {
        self.jacobi_violations == 0 && self.killing.negative == self.dim && self.center_dim == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{Signature, SpinorModule};
    use crate::exactla::q;
    use proptest::prelude::*;

    /// `𝔰𝔬(p, q)` from commutators of its matrix basis.
    fn rotation_algebra(p: usize, qq: usize) -> SuperAlgebra {
        let module = SpinorModule::minimal(Signature::auto(p, qq).unwrap()).unwrap();
        let so = module.so_basis();
        let n = so.len();
        let mut alg = SuperAlgebra::new(vec![0; n], vec![false; n]);
        for i in 0..n {
            for j in i + 1..n {
                let c = so.coordinates(&so.matrix(i).commutator(so.matrix(j))).unwrap();
                alg.set_bracket(i, j, crate::exactla::sparse::from_dense(&c));
            }
        }
        alg
    }

    #[test]
    fn orthogonal_algebras_have_the_expected_killing_signature() {
        let so4 = LieCertificate::of(&rotation_algebra(0, 4));
        assert!(so4.is_compact_semisimple());
        assert_eq!(so4.derived_dim, 6);
        let so13 = LieCertificate::of(&rotation_algebra(1, 3));
        assert_eq!(so13.killing, Inertia { positive: 3, negative: 3, zero: 0 });
        assert_eq!(so13.center_dim, 0);
    }

    #[test]
    fn abelian_algebra_is_its_own_center() {
        let a = SuperAlgebra::new(vec![0; 3], vec![false; 3]);
        let c = LieCertificate::of(&a);
        assert_eq!((c.center_dim, c.derived_dim, c.killing.zero), (3, 0, 3));
    }

    #[test]
    fn zero_diagonal_needs_an_off_diagonal_pivot() {
        let h = vec![vec![q(0, 1), q(1, 1)], vec![q(1, 1), q(0, 1)]];
        assert_eq!(inertia(&h), Inertia { positive: 1, negative: 1, zero: 0 });
    }

    proptest! {
        /// Congruence `P D Pᵀ` with unit lower-triangular `P` preserves the
        /// sign counts of the diagonal `D`.
        #[test]
        fn inertia_is_a_congruence_invariant(
            d in prop::collection::vec(-3i64..=3, 1..6),
            lower in prop::collection::vec(-4i64..=4, 15),
        ) {
            let n = d.len();
            let mut p = vec![vec![Rational::zero(); n]; n];
            let mut it = lower.iter();
            for i in 0..n {
                p[i][i] = Rational::one();
                for j in 0..i {
                    p[i][j] = Rational::from_int(*it.next().unwrap());
                }
            }
            // Reverse the order so the pivot search sees a non-diagonal form.
            let m: Vec<Vec<Rational>> = (0..n)
                .map(|i| (0..n).map(|j| (0..n).map(|k| &p[n - 1 - i][k] * &p[n - 1 - j][k] * Rational::from_int(d[k])).sum()).collect())
                .collect();
            let expect = Inertia {
                positive: d.iter().filter(|&&x| x > 0).count(),
                negative: d.iter().filter(|&&x| x < 0).count(),
                zero: d.iter().filter(|&&x| x == 0).count(),
            };
            prop_assert_eq!(inertia(&m), expect);
        }
    }
}
