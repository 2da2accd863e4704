//! Metric Lie pairs `(𝔤, 𝔥, η)` with `𝔤 = V ⊕ 𝔥` as vector spaces.

use super::HomogError;
use crate::deform::FilteredDeformation;
use crate::exactla::{Rational, SparseVec};
use crate::flatmodel::SuperAlgebra;

/// A Lie algebra whose first `vdim` basis elements span a complement of
/// the subalgebra `𝔥` spanned by the rest, with a diagonal `𝔥`-invariant
/// inner product on the complement.
#[derive(Clone, Debug)]
pub struct MetricLiePair {
    algebra: SuperAlgebra,
    vdim: usize,
    eta: Vec<Rational>,
}

impl MetricLiePair {
    pub fn new(algebra: SuperAlgebra, vdim: usize, eta: Vec<Rational>) -> Result<Self, HomogError> {
        let n = algebra.dim();
        if eta.len() != vdim || vdim > n {
            return Err(HomogError::Shape(format!("η has {} entries for a complement of dim {vdim}", eta.len())));
        }
        if let Some(i) = (0..n).find(|&i| algebra.is_odd(i)) {
            return Err(HomogError::OddElement(i));
        }
        if let Some(a) = eta.iter().position(Rational::is_zero) {
            return Err(HomogError::Degenerate(a));
        }
        for i in vdim..n {
            for j in vdim..n {
                if algebra.bracket_basis(i, j).iter().any(|(k, _)| *k < vdim) {
                    return Err(HomogError::NotClosed(i, j));
                }
            }
        }
        let violations = algebra.super_jacobi_check().len();
        if violations > 0 {
            return Err(HomogError::NotLie(violations));
        }
        let pair = MetricLiePair { algebra, vdim, eta };
        for k in vdim..n {
            let m = pair.isotropy(k);
            for a in 0..vdim {
                for b in a..vdim {
                    if &pair.eta[a] * &m[a][b] + &pair.eta[b] * &m[b][a] != Rational::zero() {
                        return Err(HomogError::NotInvariant { element: k, a, b });
                    }
                }
            }
        }
        Ok(pair)
    }

    /// The even part `V ⊕ 𝔥` of a deformation, with `η` from the signature.
    pub fn from_deformation(def: &FilteredDeformation) -> Result<Self, HomogError> {
        let sub = def.graded_subalgebra()?;
        let l = sub.layout();
        let keep: Vec<usize> = (0..l.v).chain((0..l.h).map(|k| l.hi(k))).collect();
        let algebra = def.algebra.sub_by_indices(&keep);
        let sig = sub.model().signature();
        let eta = (0..l.v).map(|a| Rational::from_int(sig.eta(a))).collect();
        MetricLiePair::new(algebra, l.v, eta)
    }

    /// The abelian pair `𝔤 = V`, `𝔥 = 0`.
    pub fn abelian(eta: Vec<Rational>) -> Result<Self, HomogError> {
        let n = eta.len();
        MetricLiePair::new(SuperAlgebra::new(vec![-2; n], vec![false; n]), n, eta)
    }

    pub fn algebra(&self) -> &SuperAlgebra {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn vdim(&self) -> usize {
        self.vdim
    }

    pub fn eta(&self) -> &[Rational] {
        &self.eta
    }

    /// Projection `𝔤 → 𝔤/𝔥 ≅ V`.
    pub fn project(&self, x: &[(usize, Rational)]) -> SparseVec {
        x.iter().filter(|(k, _)| *k < self.vdim).cloned().collect()
    }

    /// `⟨x, y⟩ = η(x̄, ȳ)`.
    pub fn pairing(&self, x: &[(usize, Rational)], y: &[(usize, Rational)]) -> Rational {
        let (mut i, mut j) = (0, 0);
        let mut acc = Rational::zero();
        while i < x.len() && j < y.len() {
            let (a, b) = (x[i].0, y[j].0);
            if a >= self.vdim || b >= self.vdim {
                break;
            }
            match a.cmp(&b) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += &self.eta[a] * &x[i].1 * &y[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// The matrix of `ad_X` on `𝔤/𝔥` as dense rows, for `X` a basis element.
    pub fn isotropy(&self, k: usize) -> Vec<Vec<Rational>> {
        let mut m = vec![vec![Rational::zero(); self.vdim]; self.vdim];
        for b in 0..self.vdim {
            for (a, x) in self.algebra.bracket_basis(k, b) {
                if *a < self.vdim {
                    m[*a][b] = x.clone();
                }
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abelian_pair_is_valid() {
        let p = MetricLiePair::abelian(vec![Rational::one(), -Rational::one()]).unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(p.pairing(&[(0, Rational::from_int(2)), (1, Rational::one())], &[(1, Rational::from_int(3))]), Rational::from_int(-3));
    }

    #[test]
    fn rotations_preserve_a_definite_metric_but_not_an_indefinite_one() {
        // 𝔤 = V ⊕ ⟨A⟩ with A the rotation e_0 ↦ e_1, e_1 ↦ −e_0.
        let mut alg = SuperAlgebra::new(vec![-2, -2, 0], vec![false; 3]);
        alg.set_bracket(2, 0, vec![(1, Rational::one())]);
        alg.set_bracket(2, 1, vec![(0, -Rational::one())]);
        assert!(MetricLiePair::new(alg.clone(), 2, vec![Rational::one(), Rational::one()]).is_ok());
        assert!(matches!(
            MetricLiePair::new(alg, 2, vec![Rational::one(), -Rational::one()]),
            Err(HomogError::NotInvariant { .. })
        ));
    }
}
