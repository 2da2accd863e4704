//! The Clifford algebra on basis blades `e_I`, `I ⊆ {0..n-1}` as a bitmask.

use super::Signature;
use crate::exactla::Rational;

#[derive(Clone, Debug)]
pub struct CliffordAlgebra {
    signature: Signature,
}

/// A general element: coefficients indexed by blade mask.
pub type Multivector = Vec<Rational>;

impl CliffordAlgebra {
    pub fn new(signature: Signature) -> Self {
        CliffordAlgebra { signature }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn num_blades(&self) -> usize {
        1 << self.signature.dim()
    }

    /// `e_I · e_J = sign · e_{I△J}`.
    pub fn blade_product(&self, a: u32, b: u32) -> (i64, u32) {
        let mut sign = 1i64;
        // Reorder: each generator of b passes the generators of a above it.
        let mut rest = b;
        while rest != 0 {
            let j = rest.trailing_zeros();
            rest &= rest - 1;
            if (a >> (j + 1)).count_ones() % 2 == 1 {
                sign = -sign;
            }
        }
        let mut common = a & b;
        while common != 0 {
            let i = common.trailing_zeros();
            common &= common - 1;
            sign *= self.signature.generator_square(i as usize);
        }
        (sign, a ^ b)
    }

    /// Full multiplication table, row-major over blade masks.
    pub fn table(&self) -> Vec<(i64, u32)> {
        let n = self.num_blades() as u32;
        (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .map(|(a, b)| self.blade_product(a, b))
            .collect()
    }

    pub fn basis_blade(&self, mask: u32) -> Multivector {
        let mut v = vec![Rational::zero(); self.num_blades()];
        v[mask as usize] = Rational::one();
        v
    }

    pub fn mul(&self, x: &Multivector, y: &Multivector) -> Multivector {
        let mut out = vec![Rational::zero(); self.num_blades()];
        for (a, xa) in x.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (b, yb) in y.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                let (s, m) = self.blade_product(a as u32, b as u32);
                out[m as usize] += &(xa * yb) * &Rational::from_int(s);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_squares() {
        let c = CliffordAlgebra::new(Signature::new(1, 0, 1).unwrap());
        assert_eq!(c.blade_product(1, 1), (1, 0));
        let c = CliffordAlgebra::new(Signature::new(0, 1, 1).unwrap());
        assert_eq!(c.blade_product(1, 1), (-1, 0));
    }

    #[test]
    fn bivector_square_in_1_1() {
        // (e1 e2)(e1 e2) = -e1 e1 e2 e2 = -(+1)(-1) = +1.
        let c = CliffordAlgebra::new(Signature::new(1, 1, 1).unwrap());
        let e12 = c.basis_blade(0b11);
        assert_eq!(c.mul(&e12, &e12), c.basis_blade(0));
    }

    #[test]
    fn relations_and_associativity() {
        for (p, q) in [(2, 1), (1, 3), (0, 4)] {
            for sign in [1, -1] {
                let c = CliffordAlgebra::new(Signature::new(p, q, sign).unwrap());
                let n = c.num_blades() as u32;
                for i in 0..(p + q) as u32 {
                    for j in 0..(p + q) as u32 {
                        let (s1, m1) = c.blade_product(1 << i, 1 << j);
                        let (s2, m2) = c.blade_product(1 << j, 1 << i);
                        assert_eq!(m1, m2);
                        if i == j {
                            assert_eq!(s1, c.signature().generator_square(i as usize));
                        } else {
                            assert_eq!(s1, -s2);
                        }
                    }
                }
                for a in 0..n {
                    for b in 0..n {
                        for d in 0..n {
                            let (s_ab, ab) = c.blade_product(a, b);
                            let (s1, m1) = c.blade_product(ab, d);
                            let (s_bd, bd) = c.blade_product(b, d);
                            let (s2, m2) = c.blade_product(a, bd);
                            assert_eq!((s_ab * s1, m1), (s_bd * s2, m2));
                        }
                    }
                }
            }
        }
    }
}
