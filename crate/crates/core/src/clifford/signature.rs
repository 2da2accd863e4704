//! Metric signatures and the Clifford sign convention.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::CliffordError;

/// How the sign in `v·v = ±η(v,v)` is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// The sign giving the smaller irreducible real pinor module; ties go to `+`.
    #[default]
    Auto,
    Plus,
    Minus,
}

impl FromStr for Convention {
    type Err = CliffordError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Convention::Auto),
            "plus" | "+" => Ok(Convention::Plus),
            "minus" | "-" => Ok(Convention::Minus),
            other => Err(CliffordError::InvalidSignature(format!("unknown convention {other:?}"))),
        }
    }
}

/// `η = diag(+1 × p, −1 × q)` together with the Clifford sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub p: usize,
    pub q: usize,
    pub clifford_sign: i8,
}

/// Dimension of an irreducible real module of the Clifford algebra with
/// `r` generators squaring to `+1` and `s` squaring to `−1`.
pub fn irreducible_module_dim(r: usize, s: usize) -> usize {
    let n = r + s;
    match (r as i64 - s as i64).rem_euclid(8) {
        0 | 2 => 1 << (n / 2),
        1 => 1 << ((n - 1) / 2),
        3 | 7 | 5 => 1 << n.div_ceil(2),
        _ => 1 << ((n + 2) / 2),
    }
}

impl Signature {
    pub fn new(p: usize, q: usize, clifford_sign: i8) -> Result<Self, CliffordError> {
        if p + q == 0 {
            return Err(CliffordError::InvalidSignature("p + q must be at least 1".into()));
        }
        if clifford_sign != 1 && clifford_sign != -1 {
            return Err(CliffordError::InvalidSignature("clifford sign must be ±1".into()));
        }
        Ok(Signature { p, q, clifford_sign })
    }

    pub fn with_convention(p: usize, q: usize, conv: Convention) -> Result<Self, CliffordError> {
        let sign = match conv {
            Convention::Plus => 1,
            Convention::Minus => -1,
            Convention::Auto => {
                let plus = irreducible_module_dim(p, q);
                let minus = irreducible_module_dim(q, p);
                if minus < plus {
                    -1
                } else {
                    1
                }
            }
        };
        Self::new(p, q, sign)
    }

    /// Auto convention.
    pub fn auto(p: usize, q: usize) -> Result<Self, CliffordError> {
        Self::with_convention(p, q, Convention::Auto)
    }

    pub fn dim(&self) -> usize {
        self.p + self.q
    }

    /// Diagonal metric entry `η_ii`.
    pub fn eta(&self, i: usize) -> i64 {
        if i < self.p {
            1
        } else {
            -1
        }
    }

    /// `eᵢ·eᵢ = clifford_sign · η_ii`.
    pub fn generator_square(&self, i: usize) -> i64 {
        self.clifford_sign as i64 * self.eta(i)
    }

    /// Numbers of generators squaring to `+1` and to `−1`.
    pub fn square_counts(&self) -> (usize, usize) {
        if self.clifford_sign == 1 {
            (self.p, self.q)
        } else {
            (self.q, self.p)
        }
    }

    pub fn is_lorentzian(&self) -> bool {
        self.p == 1
    }

    /// Whether there are two inequivalent irreducible pinor modules.
    pub fn has_two_pinor_modules(&self) -> bool {
        let (r, s) = self.square_counts();
        (r as i64 - s as i64).rem_euclid(4) == 1
    }

    pub fn pinor_dim(&self) -> usize {
        let (r, s) = self.square_counts();
        irreducible_module_dim(r, s)
    }

    /// Dimension of `𝔰𝔬(V)`.
    pub fn so_dim(&self) -> usize {
        let n = self.dim();
        n * (n - 1) / 2
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.clifford_sign == 1 { "+" } else { "-" };
        write!(f, "({},{}) sign {s}", self.p, self.q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auto_convention_choices() {
        assert_eq!(Signature::auto(1, 10).unwrap().clifford_sign, -1);
        assert_eq!(Signature::auto(0, 7).unwrap().clifford_sign, 1);
        assert_eq!(Signature::auto(1, 1).unwrap().clifford_sign, 1);
        assert_eq!(Signature::auto(1, 3).unwrap().clifford_sign, -1);
        assert_eq!(Signature::auto(1, 9).unwrap().clifford_sign, 1);
    }

    #[test]
    fn rejects_empty() {
        assert!(Signature::new(0, 0, 1).is_err());
        assert!(Signature::new(1, 0, 2).is_err());
    }
}
