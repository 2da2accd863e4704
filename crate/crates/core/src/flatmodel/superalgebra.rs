//! Graded Lie (super)algebras given by structure constants, and the
//! brute-force super-Jacobi oracle.

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::FlatModelError;
use crate::exactla::{sparse, Rational, RationalTensor, SparseVec};

/// One basis triple where the graded Jacobi identity fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JacobiViolation {
    pub triple: (usize, usize, usize),
    pub residual: SparseVec,
}

/// Basis with degrees and parities; bracket `[e_i, e_j]` stored for all ordered pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperAlgebra {
    degrees: Vec<i32>,
    odd: Vec<bool>,
    table: Vec<SparseVec>,
}

impl SuperAlgebra {
    pub fn new(degrees: Vec<i32>, odd: Vec<bool>) -> Self {
        assert_eq!(degrees.len(), odd.len());
        let n = degrees.len();
        SuperAlgebra { degrees, odd, table: vec![Vec::new(); n * n] }
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.degrees[i]
    }

    pub fn degrees(&self) -> &[i32] {
        &self.degrees
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.odd[i]
    }

    pub fn parities(&self) -> &[bool] {
        &self.odd
    }

    /// Sign `(−1)^{|i||j|}`.
    pub fn koszul(&self, i: usize, j: usize) -> i64 {
        if self.odd[i] && self.odd[j] {
            -1
        } else {
            1
        }
    }

    /// Sets `[e_i, e_j]` and the graded-symmetric partner `[e_j, e_i]`.
    pub fn set_bracket(&mut self, i: usize, j: usize, value: SparseVec) {
        let n = self.dim();
        let partner_sign = Rational::from_int(-self.koszul(i, j));
        self.table[j * n + i] = sparse::scale(&value, &partner_sign);
        self.table[i * n + j] = value;
    }

    /// Adds to `[e_i, e_j]` and the graded-symmetric partner.
    pub fn add_bracket(&mut self, i: usize, j: usize, value: &[(usize, Rational)]) {
        let n = self.dim();
        let cur = self.table[i * n + j].clone();
        let sum = sparse::axpy(&cur, &Rational::one(), value);
        if i == j {
            self.table[i * n + i] = sum;
        } else {
            self.set_bracket(i, j, sum);
        }
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> &SparseVec {
        &self.table[i * self.dim() + j]
    }

    /// Bilinear extension of the bracket.
    pub fn bracket(&self, x: &[(usize, Rational)], y: &[(usize, Rational)]) -> SparseVec {
        let n = self.dim();
        let mut acc = vec![Rational::zero(); n];
        let mut touched = false;
        for (i, xi) in x {
            for (j, yj) in y {
                let b = &self.table[i * n + j];
                if b.is_empty() {
                    continue;
                }
                let c = xi * yj;
                for (k, v) in b {
                    acc[*k] += &c * v;
                    touched = true;
                }
            }
        }
        if touched {
            sparse::from_dense(&acc)
        } else {
            Vec::new()
        }
    }

    /// Checks graded symmetry and that brackets add degrees and parities.
    pub fn check_structure(&self) -> Result<(), FlatModelError> {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                let b = self.bracket_basis(i, j);
                let back = sparse::scale(self.bracket_basis(j, i), &Rational::from_int(-self.koszul(i, j)));
                if *b != back {
                    return Err(FlatModelError::Structure(format!("[{i},{j}] is not graded-symmetric")));
                }
                for (k, _) in b {
                    if self.degrees[*k] != self.degrees[i] + self.degrees[j]
                        || self.odd[*k] != (self.odd[i] ^ self.odd[j])
                    {
                        return Err(FlatModelError::Structure(format!(
                            "[{i},{j}] has a component outside the expected graded piece"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// `[x,[y,z]] − [[x,y],z] − (−1)^{|x||y|}[y,[x,z]]` on basis elements.
    pub fn jacobiator(&self, i: usize, j: usize, k: usize) -> SparseVec {
        let ei = vec![(i, Rational::one())];
        let ej = vec![(j, Rational::one())];
        let ek = vec![(k, Rational::one())];
        let a = self.bracket(&ei, self.bracket_basis(j, k));
        let b = self.bracket(self.bracket_basis(i, j), &ek);
        let c = self.bracket(&ej, self.bracket_basis(i, k));
        let sign = Rational::from_int(-self.koszul(i, j));
        sparse::axpy(&sparse::axpy(&a, &-Rational::one(), &b), &sign, &c)
    }

    /// Every basis triple `i ≤ j ≤ k` with a nonzero Jacobiator.
    pub fn super_jacobi_check(&self) -> Vec<JacobiViolation> {
        let n = self.dim();
        (0..n)
            .into_par_iter()
            .flat_map_iter(|i| {
                (i..n).flat_map(move |j| (j..n).map(move |k| (i, j, k)))
            })
            .filter_map(|(i, j, k)| {
                let r = self.jacobiator(i, j, k);
                (!r.is_empty()).then_some(JacobiViolation { triple: (i, j, k), residual: r })
            })
            .collect()
    }

    /// Structure constants as a rank-3 tensor `[i, j, k]`.
    pub fn to_tensor(&self) -> RationalTensor {
        let n = self.dim();
        let mut t = RationalTensor::zeros(vec![n, n, n]);
        for i in 0..n {
            for j in 0..n {
                for (k, v) in self.bracket_basis(i, j) {
                    t.set(vec![i, j, *k], v.clone()).expect("in range");
                }
            }
        }
        t
    }

    pub fn from_tensor(
        degrees: Vec<i32>,
        odd: Vec<bool>,
        t: &RationalTensor,
    ) -> Result<Self, FlatModelError> {
        let n = degrees.len();
        if t.shape() != [n, n, n] || odd.len() != n {
            return Err(FlatModelError::Structure("bracket tensor shape".into()));
        }
        let mut alg = SuperAlgebra::new(degrees, odd);
        let mut raw: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n * n];
        for (idx, v) in t.entries() {
            raw[idx[0] * n + idx[1]].push((idx[2], v.clone()));
        }
        alg.table = raw.into_iter().map(sparse::normalize).collect();
        Ok(alg)
    }

    /// Restricts to the even part (a Lie algebra), renumbering basis elements.
    pub fn even_part(&self) -> (SuperAlgebra, Vec<usize>) {
        let keep: Vec<usize> = (0..self.dim()).filter(|&i| !self.odd[i]).collect();
        (self.sub_by_indices(&keep), keep)
    }

    /// Subalgebra spanned by a subset of basis elements (brackets projected).
    pub fn sub_by_indices(&self, keep: &[usize]) -> SuperAlgebra {
        let mut map = vec![usize::MAX; self.dim()];
        for (k, &i) in keep.iter().enumerate() {
            map[i] = k;
        }
        let mut alg = SuperAlgebra::new(
            keep.iter().map(|&i| self.degrees[i]).collect(),
            keep.iter().map(|&i| self.odd[i]).collect(),
        );
        let m = keep.len();
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                alg.table[a * m + b] = self
                    .bracket_basis(i, j)
                    .iter()
                    .filter(|(k, _)| map[*k] != usize::MAX)
                    .map(|(k, v)| (map[*k], v.clone()))
                    .collect::<Vec<_>>();
                alg.table[a * m + b].sort_by_key(|(k, _)| *k);
            }
        }
        alg
    }
}

#[derive(Serialize, Deserialize)]
struct Wire {
    degrees: Vec<i32>,
    odd: Vec<bool>,
    bracket: RationalTensor,
}

impl Serialize for SuperAlgebra {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Wire { degrees: self.degrees.clone(), odd: self.odd.clone(), bracket: self.to_tensor() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SuperAlgebra {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = Wire::deserialize(d)?;
        SuperAlgebra::from_tensor(w.degrees, w.odd, &w.bracket).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::q;

    /// 𝔰𝔬(3) from skew matrices: [L_i, L_j] = ε_ijk L_k.
    fn so3(perturb: bool) -> SuperAlgebra {
        let mut a = SuperAlgebra::new(vec![0; 3], vec![false; 3]);
        let e01 = if perturb { vec![(1, q(1, 1)), (2, q(1, 1))] } else { vec![(2, q(1, 1))] };
        a.set_bracket(0, 1, e01);
        a.set_bracket(1, 2, vec![(0, q(1, 1))]);
        a.set_bracket(2, 0, vec![(1, q(1, 1))]);
        a
    }

    #[test]
    fn abelian_is_jacobi() {
        let a = SuperAlgebra::new(vec![0, 0], vec![false, true]);
        assert!(a.super_jacobi_check().is_empty());
    }

    #[test]
    fn so3_structure_constants() {
        // Re-derive from the skew matrices (L_i)_jk = -ε_ijk.
        let eps = |i: usize, j: usize, k: usize| -> i64 {
            match (i, j, k) {
                (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
                (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
                _ => 0,
            }
        };
        let l = |i: usize| -> Vec<Vec<i64>> {
            (0..3).map(|j| (0..3).map(|k| -eps(i, j, k)).collect()).collect()
        };
        let mul = |a: &Vec<Vec<i64>>, b: &Vec<Vec<i64>>| -> Vec<Vec<i64>> {
            (0..3)
                .map(|r| (0..3).map(|c| (0..3).map(|t| a[r][t] * b[t][c]).sum()).collect())
                .collect()
        };
        let (l0, l1, l2) = (l(0), l(1), l(2));
        let comm: Vec<Vec<i64>> = mul(&l0, &l1)
            .iter()
            .zip(mul(&l1, &l0))
            .map(|(x, y)| x.iter().zip(y).map(|(a, b)| a - b).collect())
            .collect();
        assert_eq!(comm, l2);
        assert!(so3(false).super_jacobi_check().is_empty());
        assert!(so3(false).check_structure().is_ok());
    }

    #[test]
    fn so3_perturbed_bracket_fails() {
        // Flipping one sign only gives so(2,1); adding e1 to [e0,e1] gives Jac(e0,e1,e2) = -e0.
        assert!(!so3(true).super_jacobi_check().is_empty());
    }

    #[test]
    fn json_round_trip() {
        let a = so3(false);
        let s = serde_json::to_string(&a).unwrap();
        let b: SuperAlgebra = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }
}
