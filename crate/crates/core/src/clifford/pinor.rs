//! Real irreducible pinor modules built from Pauli strings.
//!
//! Write `(r, s)` for the numbers of generators squaring to `+1` and `−1`.
//! The construction reduces `(r, s)` to a base case by two doubling rules:
//!
//! * `(r, s) → (r+1, s+1)`: `Γᵢ ⊗ Z` for the old generators, plus `1 ⊗ X`
//!   (square `+1`) and `1 ⊗ E` (square `−1`).
//! * `(r, s) → (s+2, r)`: `Γᵢ ⊗ XZ` (which flips every square, since
//!   `(XZ)² = −1`), plus `1 ⊗ X` and `1 ⊗ Z`.
//!
//! Base cases `(0, s)` with `s ≤ 8` come from a lexicographic search over
//! Pauli strings of the right length; larger `s` use `Cl(0, s+8) ≅ Cl(0, s) ⊗
//! Cl(0, 8)` via `γᵢ ⊗ ω₈` and `1 ⊗ gⱼ`. Each rule doubles the module, which
//! matches the growth of the irreducible dimension, so the result is
//! irreducible whenever the final dimension equals the irreducible one.

use serde::Serialize;

use super::monomial::{Monomial, Pauli};
use super::signature::irreducible_module_dim;
use super::{CliffordError, Signature};
use crate::exactla::{q, Rational, SparseMatrix, Subspace};

/// Splitting of a pinor module by the volume element when `ω² = +1`.
#[derive(Clone, Debug)]
pub struct Chirality {
    pub p_plus: SparseMatrix,
    pub p_minus: SparseMatrix,
    pub plus: Subspace,
    pub minus: Subspace,
}

#[derive(Clone, Debug)]
pub struct PinorModule {
    signature: Signature,
    gammas: Vec<Monomial>,
    gamma_matrices: Vec<SparseMatrix>,
    volume: Monomial,
    chirality: Option<Chirality>,
    volume_sign: Option<i8>,
}

/// Summary suitable for reports.
#[derive(Clone, Debug, Serialize)]
pub struct PinorSummary {
    pub p: usize,
    pub q: usize,
    pub clifford_sign: i8,
    pub dim_s: usize,
    pub chirality: Option<(usize, usize)>,
    pub volume_sign: Option<i8>,
    pub gamma_checksums: Vec<String>,
}

fn letters(x: u32, z: u32, k: usize) -> Vec<Pauli> {
    (0..k)
        .map(|i| match ((x >> i) & 1, (z >> i) & 1) {
            (0, 0) => Pauli::I,
            (1, 0) => Pauli::X,
            (0, 1) => Pauli::Z,
            _ => Pauli::E,
        })
        .collect()
}

/// Pauli strings on `k` qubits: `s` pairwise anticommuting, each squaring to `−1`.
fn negative_base(s: usize) -> Vec<Monomial> {
    let dim = irreducible_module_dim(0, s);
    let k = dim.trailing_zeros() as usize;
    let cands: Vec<(u32, u32)> = (0..1u32 << k)
        .flat_map(|x| (0..1u32 << k).map(move |z| (x, z)))
        .filter(|&(x, z)| (x & z).count_ones() % 2 == 1)
        .collect();
    let anticommute =
        |a: (u32, u32), b: (u32, u32)| ((a.0 & b.1).count_ones() + (a.1 & b.0).count_ones()) % 2 == 1;
    fn dfs(
        cands: &[(u32, u32)],
        start: usize,
        chosen: &mut Vec<(u32, u32)>,
        s: usize,
        ok: &dyn Fn((u32, u32), (u32, u32)) -> bool,
    ) -> bool {
        if chosen.len() == s {
            return true;
        }
        for i in start..cands.len() {
            if chosen.iter().all(|&c| ok(c, cands[i])) {
                chosen.push(cands[i]);
                if dfs(cands, i + 1, chosen, s, ok) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    let mut chosen = Vec::new();
    assert!(dfs(&cands, 0, &mut chosen, s, &anticommute), "no Pauli base for (0,{s})");
    chosen
        .into_iter()
        .map(|(x, z)| Monomial::from_paulis(&letters(x, z, k)))
        .collect()
}

fn product(ms: &[Monomial], dim: usize) -> Monomial {
    ms.iter().fold(Monomial::identity(dim), |acc, m| acc.compose(m))
}

/// Generators squaring to `+1` and to `−1` for counts `(r, s)`.
fn generators(r: usize, s: usize) -> (Vec<Monomial>, Vec<Monomial>) {
    if r >= 1 && s >= 1 {
        let (pl, mi) = generators(r - 1, s - 1);
        let dim = pl.first().or(mi.first()).map_or(1, Monomial::dim);
        let z = Pauli::Z.monomial();
        let id = Monomial::identity(dim);
        let mut plus: Vec<Monomial> = pl.iter().map(|g| g.kron(&z)).collect();
        plus.push(id.kron(&Pauli::X.monomial()));
        let mut minus: Vec<Monomial> = mi.iter().map(|g| g.kron(&z)).collect();
        minus.push(id.kron(&Pauli::E.monomial()));
        (plus, minus)
    } else if s == 0 && r >= 2 {
        let (pl, mi) = generators(0, r - 2);
        let dim = mi.first().map_or(1, Monomial::dim);
        let xz = Pauli::X.monomial().compose(&Pauli::Z.monomial());
        let id = Monomial::identity(dim);
        let mut plus: Vec<Monomial> = mi.iter().map(|g| g.kron(&xz)).collect();
        plus.push(id.kron(&Pauli::X.monomial()));
        plus.push(id.kron(&Pauli::Z.monomial()));
        let minus = pl.iter().map(|g| g.kron(&xz)).collect();
        (plus, minus)
    } else if r == 1 {
        (vec![Monomial::identity(1)], Vec::new())
    } else if s <= 8 {
        (Vec::new(), negative_base(s))
    } else {
        let (_, mi) = generators(0, s - 8);
        let dim = mi.first().map_or(1, Monomial::dim);
        let g8 = negative_base(8);
        let w8 = product(&g8, g8[0].dim());
        let id = Monomial::identity(dim);
        let mut minus: Vec<Monomial> = mi.iter().map(|g| g.kron(&w8)).collect();
        minus.extend(g8.iter().map(|g| id.kron(g)));
        (Vec::new(), minus)
    }
}

impl PinorModule {
    /// Builds the irreducible pinor module and verifies the Clifford relations.
    pub fn build(signature: Signature) -> Result<Self, CliffordError> {
        let n = signature.dim();
        let (r, s) = signature.square_counts();
        let (plus, minus) = generators(r, s);
        let (mut plus, mut minus) = (plus.into_iter(), minus.into_iter());
        let mut gammas: Vec<Monomial> = (0..n)
            .map(|i| {
                if signature.generator_square(i) == 1 {
                    plus.next()
                } else {
                    minus.next()
                }
                .expect("generator count")
            })
            .collect();
        let dim = gammas[0].dim();
        if dim != irreducible_module_dim(r, s) {
            return Err(CliffordError::Construction(format!(
                "built dimension {dim}, expected {}",
                irreducible_module_dim(r, s)
            )));
        }
        let mut volume = product(&gammas, dim);
        let mut volume_sign = None;
        if signature.has_two_pinor_modules() {
            let v = volume.scalar_value().ok_or_else(|| {
                CliffordError::Construction("volume element is not central".into())
            })?;
            if v == -1 {
                let last = gammas.pop().expect("nonempty");
                gammas.push(last.negate());
                volume = product(&gammas, dim);
            }
            volume_sign = Some(1);
        }
        let chirality = if n.is_multiple_of(2) && volume.compose(&volume).scalar_value() == Some(1) {
            let w = volume.to_matrix();
            let id = SparseMatrix::identity(dim);
            let half = q(1, 2);
            let p_plus = id.add(&w).scale(&half);
            let p_minus = id.sub(&w).scale(&half);
            let plus = Subspace::from_spanning(dim, p_plus.transpose().rows());
            let minus = Subspace::from_spanning(dim, p_minus.transpose().rows());
            Some(Chirality { p_plus, p_minus, plus, minus })
        } else {
            None
        };
        let gamma_matrices = gammas.iter().map(Monomial::to_matrix).collect();
        let module =
            PinorModule { signature, gammas, gamma_matrices, volume, chirality, volume_sign };
        module.verify_relations()?;
        Ok(module)
    }

    /// `ΓᵢΓⱼ + ΓⱼΓᵢ = 2·clifford_sign·ηᵢⱼ·1`.
    pub fn verify_relations(&self) -> Result<(), CliffordError> {
        let n = self.gammas.len();
        for i in 0..n {
            for j in i..n {
                let ij = self.gammas[i].compose(&self.gammas[j]);
                let ji = self.gammas[j].compose(&self.gammas[i]);
                let ok = if i == j {
                    ij.scalar_value() == Some(self.signature.generator_square(i) as i8)
                } else {
                    ij == ji.negate()
                };
                if !ok {
                    return Err(CliffordError::Construction(format!(
                        "anticommutator fails for ({i},{j})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn dim(&self) -> usize {
        self.gammas[0].dim()
    }

    pub fn gammas(&self) -> &[Monomial] {
        &self.gammas
    }

    pub fn gamma(&self, i: usize) -> &SparseMatrix {
        &self.gamma_matrices[i]
    }

    pub fn gamma_matrices(&self) -> &[SparseMatrix] {
        &self.gamma_matrices
    }

    pub fn volume(&self) -> &Monomial {
        &self.volume
    }

    pub fn chirality(&self) -> Option<&Chirality> {
        self.chirality.as_ref()
    }

    pub fn volume_sign(&self) -> Option<i8> {
        self.volume_sign
    }

    /// Clifford product `Γ_{i₁} ⋯ Γ_{i_k}` for the blade with bitmask `mask`.
    pub fn blade(&self, mask: u32) -> Monomial {
        let mut acc = Monomial::identity(self.dim());
        for i in 0..self.gammas.len() {
            if mask >> i & 1 == 1 {
                acc = acc.compose(&self.gammas[i]);
            }
        }
        acc
    }

    /// Clifford action of a vector with coordinates `v`.
    pub fn clifford_action(&self, v: &[Rational]) -> SparseMatrix {
        let mut acc = SparseMatrix::zeros(self.dim(), self.dim());
        for (i, c) in v.iter().enumerate() {
            if !c.is_zero() {
                acc = acc.add_scaled(c, &self.gamma_matrices[i]);
            }
        }
        acc
    }

    pub fn summary(&self) -> PinorSummary {
        PinorSummary {
            p: self.signature.p,
            q: self.signature.q,
            clifford_sign: self.signature.clifford_sign,
            dim_s: self.dim(),
            chirality: self.chirality.as_ref().map(|c| (c.plus.dim(), c.minus.dim())),
            volume_sign: self.volume_sign,
            gamma_checksums: self.gammas.iter().map(|g| format!("{:016x}", g.checksum())).collect(),
        }
    }
}
