//! The orthogonal Lie algebra, its 2-vector embedding and the spin action.
//!
//! Basis of `𝔰𝔬(V)`: `E_ab` for `a < b`, acting by `E_ab e_c = η_bc e_a − η_ac e_b`.
//! Its 2-vector is `e_a ∧ e_b`, and it acts on spinors by
//! `clifford_sign · ½ · Γ_a Γ_b`.

use super::{CliffordError, PinorModule, Signature};
use crate::exactla::{q, Rational, SparseMatrix};

/// Index bookkeeping for the `E_ab` basis.
#[derive(Clone, Debug)]
pub struct SoBasis {
    signature: Signature,
    pairs: Vec<(usize, usize)>,
    matrices: Vec<SparseMatrix>,
}

impl SoBasis {
    pub fn new(signature: Signature) -> Self {
        let n = signature.dim();
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let matrices = pairs
            .iter()
            .map(|&(a, b)| {
                SparseMatrix::from_triplets(
                    n,
                    n,
                    [
                        (a, b, Rational::from_int(signature.eta(b))),
                        (b, a, Rational::from_int(-signature.eta(a))),
                    ],
                )
            })
            .collect();
        SoBasis { signature, pairs, matrices }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn index(&self, a: usize, b: usize) -> Option<usize> {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        if a == b {
            return None;
        }
        self.pairs.iter().position(|&p| p == (a, b))
    }

    /// Matrix of the basis element on `V`.
    pub fn matrix(&self, k: usize) -> &SparseMatrix {
        &self.matrices[k]
    }

    pub fn matrices(&self) -> &[SparseMatrix] {
        &self.matrices
    }

    /// `Σ x_k E_k` as a matrix on `V`.
    pub fn to_matrix(&self, coords: &[Rational]) -> SparseMatrix {
        let n = self.signature.dim();
        let mut acc = SparseMatrix::zeros(n, n);
        for (c, m) in coords.iter().zip(&self.matrices) {
            if !c.is_zero() {
                acc = acc.add_scaled(c, m);
            }
        }
        acc
    }

    /// Checks `ηA + Aᵀη = 0`.
    pub fn is_skew(&self, a: &SparseMatrix) -> bool {
        let n = self.signature.dim();
        if a.nrows() != n || a.ncols() != n {
            return false;
        }
        (0..n).all(|i| {
            (0..n).all(|j| {
                let lhs = &Rational::from_int(self.signature.eta(i)) * &a.get(i, j)
                    + &Rational::from_int(self.signature.eta(j)) * &a.get(j, i);
                lhs.is_zero()
            })
        })
    }

    /// Coordinates of a skew matrix in the `E_ab` basis: `x_ab = η_bb · A_ab`.
    pub fn coordinates(&self, a: &SparseMatrix) -> Result<Vec<Rational>, CliffordError> {
        if !self.is_skew(a) {
            return Err(CliffordError::NotSkew);
        }
        Ok(self
            .pairs
            .iter()
            .map(|&(i, j)| &Rational::from_int(self.signature.eta(j)) * &a.get(i, j))
            .collect())
    }

    /// Structure constants: `[E_i, E_j] = Σ_k c_ijk E_k`.
    pub fn bracket_coords(&self, i: usize, j: usize) -> Vec<Rational> {
        let c = self.matrices[i].commutator(&self.matrices[j]);
        self.coordinates(&c).expect("commutator of skew matrices is skew")
    }
}

/// A 2-vector `Σ_{a<b} w_ab e_a ∧ e_b`, indexed like [`SoBasis`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoVector {
    pub coeffs: Vec<Rational>,
}

impl TwoVector {
    /// `ι_{u♭} ω` where `u♭ = η(u, ·)`.
    pub fn contract(&self, basis: &SoBasis, u: &[Rational]) -> Vec<Rational> {
        let sig = basis.signature();
        let mut out = vec![Rational::zero(); sig.dim()];
        for (w, &(a, b)) in self.coeffs.iter().zip(basis.pairs()) {
            if w.is_zero() {
                continue;
            }
            // ι_{u♭}(e_a ∧ e_b) = η(u, e_a) e_b − η(u, e_b) e_a
            let ua = &u[a] * &Rational::from_int(sig.eta(a));
            let ub = &u[b] * &Rational::from_int(sig.eta(b));
            out[b] += w * &ua;
            out[a] -= w * &ub;
        }
        out
    }
}

/// The 2-vector `ω_A` with `ι_{v♭} ω_A = −A v` for every `v`.
pub fn omega_of(basis: &SoBasis, a: &SparseMatrix) -> Result<TwoVector, CliffordError> {
    let coeffs = basis.coordinates(a)?;
    Ok(TwoVector { coeffs })
}

/// Matrices of the spin representation on a pinor module.
#[derive(Clone, Debug)]
pub struct SpinAction {
    matrices: Vec<SparseMatrix>,
}

impl SpinAction {
    pub fn new(basis: &SoBasis, pinor: &PinorModule) -> Self {
        let half = q(pinor.signature().clifford_sign as i64, 2);
        let matrices = basis
            .pairs()
            .iter()
            .map(|&(a, b)| pinor.gammas()[a].compose(&pinor.gammas()[b]).to_matrix().scale(&half))
            .collect();
        SpinAction { matrices }
    }

    pub fn matrix(&self, k: usize) -> &SparseMatrix {
        &self.matrices[k]
    }

    pub fn matrices(&self) -> &[SparseMatrix] {
        &self.matrices
    }

    /// `ρ(Σ x_k E_k)`.
    pub fn of(&self, coords: &[Rational], dim: usize) -> SparseMatrix {
        let mut acc = SparseMatrix::zeros(dim, dim);
        for (c, m) in coords.iter().zip(&self.matrices) {
            if !c.is_zero() {
                acc = acc.add_scaled(c, m);
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_omega_in_2_0() {
        let sig = Signature::new(2, 0, 1).unwrap();
        let basis = SoBasis::new(sig);
        // A e1 = e2, A e2 = -e1.
        let a = SparseMatrix::from_ints(&[&[0, -1], &[1, 0]]);
        let w = omega_of(&basis, &a).unwrap();
        assert_eq!(w.coeffs, vec![q(-1, 1)]);
        for v in [[q(1, 1), q(0, 1)], [q(0, 1), q(1, 1)]] {
            let lhs = w.contract(&basis, &v);
            let av = a.mul_vec(&v);
            assert!(lhs.iter().zip(&av).all(|(x, y)| (x + y).is_zero()));
        }
        assert!(omega_of(&basis, &SparseMatrix::from_ints(&[&[1, 0], &[0, 0]])).is_err());
    }

    #[test]
    fn rotation_spin_square() {
        let sig = Signature::new(2, 0, 1).unwrap();
        let basis = SoBasis::new(sig);
        let pinor = PinorModule::build(sig).unwrap();
        let rho = SpinAction::new(&basis, &pinor);
        let r = rho.matrix(0);
        assert_eq!(r.mul(r), SparseMatrix::scalar(pinor.dim(), &q(-1, 4)));
    }
}
