//! Word-size prime field arithmetic, dense echelon forms modulo a prime,
//! Chinese remaindering and rational reconstruction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::Rational;

/// Modular inverse of `a` modulo prime `p`; `a` must be nonzero mod `p`.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let quo = r / new_r;
        (t, new_t) = (new_t, t - quo * new_t);
        (r, new_r) = (new_r, r - quo * new_r);
    }
    assert!(r == 1, "{a} is not invertible modulo {p}");
    t.rem_euclid(p as i128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 32-bit inputs.
pub fn is_prime_u32(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13] {
        if n.is_multiple_of(small) {
            return n == small;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 7, 61] {
        if a % n == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Draws distinct random primes in `(2^30, 2^31)`.
pub fn random_primes(rng: &mut ChaCha8Rng, count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let cand = rng.gen_range((1u64 << 30) + 1..(1u64 << 31)) | 1;
        if is_prime_u32(cand) && !out.contains(&cand) {
            out.push(cand);
        }
    }
    out
}

/// A prime modulus with a precomputed Barrett constant.
#[derive(Clone, Copy, Debug)]
pub struct Field {
    pub p: u64,
    barrett: u64,
}

impl Field {
    pub fn new(p: u64) -> Self {
        assert!(p > 2 && p < (1 << 31));
        Field { p, barrett: (u64::MAX / p) }
    }

    /// Reduces any `x < 2^64`.
    #[inline(always)]
    pub fn reduce(&self, x: u64) -> u64 {
        let q = ((x as u128 * self.barrett as u128) >> 64) as u64;
        let mut r = x - q * self.p;
        if r >= self.p {
            r -= self.p;
        }
        if r >= self.p {
            r -= self.p;
        }
        r
    }

    #[inline(always)]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a * b)
    }

    #[inline(always)]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline(always)]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn inv(&self, a: u64) -> u64 {
        inv_mod(a, self.p)
    }

    /// `dst += f * src` over the whole slice.
    #[inline]
    pub fn axpy(&self, dst: &mut [u64], f: u64, src: &[u64]) {
        for (d, s) in dst.iter_mut().zip(src) {
            *d = self.reduce(*d + f * *s);
        }
    }
}

/// Dense row-major matrix over a prime field.
#[derive(Clone, Debug)]
pub struct DenseModMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub data: Vec<u64>,
}

/// Result of a modular echelon computation.
#[derive(Clone, Debug)]
pub struct ModEchelon {
    /// Pivot column of each nonzero row, increasing.
    pub pivots: Vec<usize>,
    /// Reduced rows, one per pivot (only populated when a reduced form was requested).
    pub matrix: DenseModMatrix,
}

impl DenseModMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        DenseModMatrix { nrows, ncols, data: vec![0; nrows * ncols] }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    fn two_rows(&mut self, a: usize, b: usize) -> (&mut [u64], &mut [u64]) {
        assert!(a != b);
        let n = self.ncols;
        if a < b {
            let (lo, hi) = self.data.split_at_mut(b * n);
            (&mut lo[a * n..(a + 1) * n], &mut hi[..n])
        } else {
            let (lo, hi) = self.data.split_at_mut(a * n);
            (&mut hi[..n], &mut lo[b * n..(b + 1) * n])
        }
    }

    /// In-place Gaussian elimination with lexicographic pivoting (first
    /// nonzero row in each column). With `reduced`, produces the reduced
    /// row echelon form; otherwise only the rank and pivots are meaningful.
    pub fn echelon(mut self, f: &Field, reduced: bool) -> ModEchelon {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.ncols {
            if r == self.nrows {
                break;
            }
            let Some(pr) = (r..self.nrows).find(|&i| self.data[i * self.ncols + c] != 0) else {
                continue;
            };
            if pr != r {
                let n = self.ncols;
                for k in c..n {
                    self.data.swap(pr * n + k, r * n + k);
                }
            }
            let inv = f.inv(self.data[r * self.ncols + c]);
            for x in &mut self.row_mut(r)[c..] {
                *x = f.mul(*x, inv);
            }
            let targets: Box<dyn Iterator<Item = usize>> = if reduced {
                Box::new((0..r).chain(r + 1..self.nrows))
            } else {
                Box::new(r + 1..self.nrows)
            };
            for i in targets {
                let factor = self.data[i * self.ncols + c];
                if factor == 0 {
                    continue;
                }
                let (dst, src) = self.two_rows(i, r);
                f.axpy(&mut dst[c..], f.neg(factor), &src[c..]);
            }
            pivots.push(c);
            r += 1;
        }
        self.nrows = r;
        self.data.truncate(r * self.ncols);
        ModEchelon { pivots, matrix: self }
    }
}

/// Incremental CRT accumulator for a vector of residues.
#[derive(Clone, Debug)]
pub struct Crt {
    pub modulus: BigInt,
    pub values: Vec<BigInt>,
}

impl Crt {
    pub fn new(p: u64, residues: &[u64]) -> Self {
        Crt {
            modulus: BigInt::from(p),
            values: residues.iter().map(|&r| BigInt::from(r)).collect(),
        }
    }

    /// Folds in residues modulo a new prime.
    pub fn push(&mut self, p: u64, residues: &[u64]) {
        assert_eq!(residues.len(), self.values.len());
        let m_mod_p = (&self.modulus % p).to_u64_digits().1.first().copied().unwrap_or(0);
        let inv = inv_mod(m_mod_p, p);
        let f = Field::new(p);
        for (v, &r) in self.values.iter_mut().zip(residues) {
            let v_mod_p = (&*v % p).to_u64_digits().1.first().copied().unwrap_or(0);
            let diff = f.add(r, f.neg(v_mod_p));
            let t = f.mul(diff, inv);
            *v += &self.modulus * BigInt::from(t);
        }
        self.modulus *= p;
    }

    /// Rational reconstruction of every entry; `None` if any entry fails.
    pub fn reconstruct(&self) -> Option<Vec<Rational>> {
        self.values.iter().map(|v| rational_reconstruct(v, &self.modulus)).collect()
    }
}

/// Finds `n/d ≡ a (mod m)` with `|n|, d ≤ sqrt(m/2)`.
pub fn rational_reconstruct(a: &BigInt, m: &BigInt) -> Option<Rational> {
    let a = a.mod_floor(m);
    if a.is_zero() {
        return Some(Rational::zero());
    }
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), a);
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let (quo, rem) = r0.div_rem(&r1);
        let t2 = &t0 - &quo * &t1;
        r0 = r1;
        r1 = rem;
        t0 = t1;
        t1 = t2;
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    if !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(Rational::from_bigints(r1, t1))
}
