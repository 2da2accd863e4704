//! Squaring maps `κ: S ⊗ S → V` built from invariant bilinear forms, and
//! sampling-based causality checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::FlatModelError;
use crate::clifford::SpinorModule;
use crate::exactla::{sparse, Rational, SparseMatrix, SparseVec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    /// Symmetric `κ`: the odd part is odd and the algebra is a superalgebra.
    Symmetric,
    /// Skew `κ`: everything is even and the algebra is a Lie algebra.
    Skew,
}

impl std::str::FromStr for Parity {
    type Err = FlatModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sym" | "symmetric" => Ok(Parity::Symmetric),
            "skew" => Ok(Parity::Skew),
            other => Err(FlatModelError::Structure(format!("unknown parity {other:?}"))),
        }
    }
}

/// `κ(s,t)^a = sᵀ K_a t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquaringMap {
    pub parity: Parity,
    pub components: Vec<SparseMatrix>,
    pub provenance: String,
}

impl SquaringMap {
    pub fn zero(vdim: usize, sdim: usize, parity: Parity) -> Self {
        SquaringMap {
            parity,
            components: vec![SparseMatrix::zeros(sdim, sdim); vdim],
            provenance: "zero".into(),
        }
    }

    pub fn vdim(&self) -> usize {
        self.components.len()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(SparseMatrix::is_zero)
    }

    /// `κ(s, t)` as a dense vector.
    pub fn eval(&self, s: &[Rational], t: &[Rational]) -> Vec<Rational> {
        self.components
            .iter()
            .map(|k| {
                let kt = k.mul_vec(t);
                s.iter().zip(&kt).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// `κ(e_i, e_j)` as a sparse vector.
    pub fn eval_basis(&self, i: usize, j: usize) -> SparseVec {
        self.components
            .iter()
            .enumerate()
            .filter_map(|(a, k)| {
                let x = k.get(i, j);
                (!x.is_zero()).then_some((a, x))
            })
            .collect()
    }

    pub fn negated(&self) -> SquaringMap {
        SquaringMap {
            parity: self.parity,
            components: self.components.iter().map(SparseMatrix::neg).collect(),
            provenance: format!("negated {}", self.provenance),
        }
    }

    /// Checks the declared symmetry entrywise.
    pub fn check_parity(&self) -> bool {
        self.components.iter().all(|k| match self.parity {
            Parity::Symmetric => k.transpose() == *k,
            Parity::Skew => k.transpose() == k.neg(),
        })
    }

    /// First basis element `A` and output `a` violating
    /// `κ(ρ(A)s, t) + κ(s, ρ(A)t) = A κ(s, t)`.
    pub fn equivariance_witness(&self, module: &SpinorModule) -> Option<(usize, usize)> {
        let so = module.so_basis();
        for k in 0..so.len() {
            let rho = module.rho(k);
            let rho_t = rho.transpose();
            let a_mat = so.matrix(k);
            for a in 0..self.vdim() {
                let lhs = rho_t.mul(&self.components[a]).add(&self.components[a].mul(rho));
                let mut rhs = SparseMatrix::zeros(module.dim(), module.dim());
                for (b, c) in a_mat.row(a) {
                    rhs = rhs.add_scaled(c, &self.components[*b]);
                }
                if lhs != rhs {
                    return Some((k, a));
                }
            }
        }
        None
    }
}

/// `η(κ(s,t), e_a) = B(s, Γ_a t)` with `B(s,t) = sᵀ form t` on the pinor copies.
pub fn build_squaring_map(
    module: &SpinorModule,
    form: &SparseMatrix,
    parity: Parity,
    provenance: &str,
) -> Result<SquaringMap, FlatModelError> {
    let sig = module.signature();
    let n = sig.dim();
    let full = module.embedding().nrows();
    if form.nrows() != full || form.ncols() != full {
        return Err(FlatModelError::Structure(format!(
            "bilinear form must be {full}x{full}, got {}x{}",
            form.nrows(),
            form.ncols()
        )));
    }
    let components: Vec<SparseMatrix> = (0..n)
        .map(|a| {
            let g = module.lift(module.pinor().gamma(a));
            module
                .restrict_form(&form.mul(&g))
                .scale(&Rational::from_int(sig.eta(a)))
        })
        .collect();
    let map = SquaringMap { parity, components, provenance: provenance.to_string() };
    if !map.check_parity() {
        return Err(FlatModelError::WrongParity);
    }
    if let Some((k, a)) = map.equivariance_witness(module) {
        return Err(FlatModelError::NotEquivariant { so_index: k, component: a });
    }
    Ok(map)
}

/// Candidate bilinear forms: the Dirac current first (Lorentzian only), then
/// every Clifford blade, each tensored with `I_N` and, for even `N`, the
/// standard symplectic `J_N`.
pub fn candidate_forms(module: &SpinorModule) -> Vec<(String, SparseMatrix)> {
    let pinor = module.pinor();
    let sig = pinor.signature();
    let n = sig.dim();
    let copies = module.extension().copies();
    let mut mixers = vec![("I".to_string(), SparseMatrix::identity(copies))];
    if copies.is_multiple_of(2) {
        let half = copies / 2;
        let j = SparseMatrix::from_triplets(
            copies,
            copies,
            (0..half).flat_map(|k| {
                [(k, k + half, Rational::one()), (k + half, k, -Rational::one())]
            }),
        );
        mixers.push(("J".to_string(), j));
    }
    let mut blades: Vec<u32> = (0..1u32 << n).collect();
    blades.sort_by_key(|m| (m.count_ones(), *m));
    let mut out = Vec::new();
    if sig.is_lorentzian() {
        let c = pinor.gamma(0).scale(&Rational::from_int(sig.clifford_sign as i64));
        for (name, m) in &mixers {
            out.push((format!("dirac-current⊗{name}"), m.kron(&c)));
        }
    }
    for mask in blades {
        let c = pinor.blade(mask).to_matrix();
        for (name, m) in &mixers {
            out.push((format!("blade-{mask:#b}⊗{name}"), m.kron(&c)));
        }
    }
    out
}

/// First candidate giving a nonzero, equivariant map of the requested parity.
pub fn find_squaring_map(module: &SpinorModule, parity: Parity) -> Option<SquaringMap> {
    candidate_forms(module).into_iter().find_map(|(name, form)| {
        build_squaring_map(module, &form, parity, &name)
            .ok()
            .filter(|m| !m.is_zero())
    })
}

/// Outcome of a causality sampling run.
#[derive(Clone, Debug, Serialize)]
pub struct CausalReport {
    pub trials: usize,
    pub basis_checked: usize,
    pub counterexample: Option<Vec<Rational>>,
}

impl CausalReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

fn causal_at(kappa: &SquaringMap, s: &[Rational], eta: impl Fn(usize) -> i64) -> bool {
    let v = kappa.eval(s, s);
    let norm: Rational = v
        .iter()
        .enumerate()
        .map(|(a, x)| &(x * x) * &Rational::from_int(eta(a)))
        .sum();
    norm.signum() >= 0 && v[0].signum() >= 0
}

/// Samples `κ(s,s)` for every basis spinor and `trials` random rational
/// spinors; requires `η(κ_s, κ_s) ≥ 0` and a non-negative time component.
pub fn check_causal(
    kappa: &SquaringMap,
    module: &SpinorModule,
    trials: usize,
    seed: u64,
) -> CausalReport {
    let sig = *module.signature();
    let eta = |a: usize| sig.eta(a);
    let dim = module.dim();
    let mut basis_checked = 0;
    for i in 0..dim {
        let s = sparse::to_dense(&[(i, Rational::one())], dim);
        basis_checked += 1;
        if !causal_at(kappa, &s, eta) {
            return CausalReport { trials: 0, basis_checked, counterexample: Some(s) };
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..trials {
        let s: Vec<Rational> = (0..dim)
            .map(|_| Rational::new(rng.gen_range(-9..=9), rng.gen_range(1..=5)))
            .collect();
        if !causal_at(kappa, &s, eta) {
            return CausalReport { trials: t + 1, basis_checked, counterexample: Some(s) };
        }
    }
    CausalReport { trials, basis_checked, counterexample: None }
}
