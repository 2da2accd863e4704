//! Signed permutation matrices and real Pauli strings.
//!
//! Every gamma matrix built here is a tensor product of the real 2×2 matrices
//! `I`, `X = [[0,1],[1,0]]`, `Z = diag(1,-1)` and `E = [[0,1],[-1,0]]`, hence a
//! signed permutation matrix.

use serde::{Deserialize, Serialize};

use crate::exactla::{Rational, SparseMatrix};

/// `M e_j = sign[j] · e_{perm[j]}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial {
    perm: Vec<u32>,
    sign: Vec<i8>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Z,
    E,
}

impl Pauli {
    pub fn monomial(self) -> Monomial {
        let (perm, sign) = match self {
            Pauli::I => (vec![0, 1], vec![1, 1]),
            Pauli::X => (vec![1, 0], vec![1, 1]),
            Pauli::Z => (vec![0, 1], vec![1, -1]),
            Pauli::E => (vec![1, 0], vec![-1, 1]),
        };
        Monomial { perm, sign }
    }
}

impl Monomial {
    pub fn identity(n: usize) -> Self {
        Monomial { perm: (0..n as u32).collect(), sign: vec![1; n] }
    }

    pub fn from_paulis(letters: &[Pauli]) -> Self {
        letters
            .iter()
            .fold(Monomial::identity(1), |acc, l| acc.kron(&l.monomial()))
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Image of basis vector `j` as `(index, sign)`.
    pub fn apply_basis(&self, j: usize) -> (usize, i8) {
        (self.perm[j] as usize, self.sign[j])
    }

    pub fn compose(&self, rhs: &Monomial) -> Monomial {
        assert_eq!(self.dim(), rhs.dim());
        let perm = rhs.perm.iter().map(|&k| self.perm[k as usize]).collect();
        let sign = rhs
            .perm
            .iter()
            .zip(&rhs.sign)
            .map(|(&k, &s)| s * self.sign[k as usize])
            .collect();
        Monomial { perm, sign }
    }

    pub fn negate(&self) -> Monomial {
        Monomial { perm: self.perm.clone(), sign: self.sign.iter().map(|s| -s).collect() }
    }

    pub fn kron(&self, rhs: &Monomial) -> Monomial {
        let m = rhs.dim();
        let mut perm = Vec::with_capacity(self.dim() * m);
        let mut sign = Vec::with_capacity(self.dim() * m);
        for (pa, sa) in self.perm.iter().zip(&self.sign) {
            for (pb, sb) in rhs.perm.iter().zip(&rhs.sign) {
                perm.push(pa * m as u32 + pb);
                sign.push(sa * sb);
            }
        }
        Monomial { perm, sign }
    }

    pub fn transpose(&self) -> Monomial {
        let mut perm = vec![0u32; self.dim()];
        let mut sign = vec![0i8; self.dim()];
        for (j, (&p, &s)) in self.perm.iter().zip(&self.sign).enumerate() {
            perm[p as usize] = j as u32;
            sign[p as usize] = s;
        }
        Monomial { perm, sign }
    }

    /// `Some(c)` when the matrix equals `c · 1`.
    pub fn scalar_value(&self) -> Option<i8> {
        let s0 = *self.sign.first()?;
        let ok = self.perm.iter().enumerate().all(|(j, &p)| p as usize == j)
            && self.sign.iter().all(|&s| s == s0);
        ok.then_some(s0)
    }

    pub fn to_matrix(&self) -> SparseMatrix {
        SparseMatrix::from_triplets(
            self.dim(),
            self.dim(),
            self.perm
                .iter()
                .zip(&self.sign)
                .enumerate()
                .map(|(j, (&p, &s))| (p as usize, j, Rational::from_int(s as i64))),
        )
    }

    /// Stable checksum of the matrix entries.
    pub fn checksum(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for (p, s) in self.perm.iter().zip(&self.sign) {
            for byte in p.to_le_bytes().into_iter().chain([*s as u8]) {
                h ^= byte as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_relations() {
        let x = Pauli::X.monomial();
        let z = Pauli::Z.monomial();
        let e = Pauli::E.monomial();
        assert_eq!(x.compose(&x).scalar_value(), Some(1));
        assert_eq!(e.compose(&e).scalar_value(), Some(-1));
        assert_eq!(x.compose(&z), e.negate());
        assert_eq!(x.compose(&z), z.compose(&x).negate());
        assert_eq!(e.transpose(), e.negate());
    }

    #[test]
    fn matrix_agrees_with_action() {
        let m = Monomial::from_paulis(&[Pauli::E, Pauli::Z]);
        let dense = m.to_matrix();
        for j in 0..4 {
            let (i, s) = m.apply_basis(j);
            assert_eq!(dense.get(i, j), Rational::from_int(s as i64));
        }
        assert_eq!(m.compose(&m).to_matrix(), dense.mul(&dense));
    }
}
