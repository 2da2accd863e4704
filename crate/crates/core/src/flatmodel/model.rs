//! The flat model `V ⊕ S ⊕ 𝔰𝔬(V)` with brackets `[A,v] = Av`,
//! `[A,s] = ρ(A)s`, `[s,t] = κ(s,t)` and `[V, V ⊕ S] = 0`.

use serde::{Deserialize, Serialize};

use super::{FlatModelError, Parity, SquaringMap, SuperAlgebra};
use crate::clifford::{Extension, Signature, SpinorModule};
use crate::exactla::{sparse, Rational, SparseVec};

/// Offsets of the three graded pieces inside a basis `V ⊕ S ⊕ 𝔥`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub v: usize,
    pub s: usize,
    pub h: usize,
}

impl Layout {
    pub fn dim(&self) -> usize {
        self.v + self.s + self.h
    }
    pub fn vi(&self, a: usize) -> usize {
        a
    }
    pub fn si(&self, i: usize) -> usize {
        self.v + i
    }
    pub fn hi(&self, k: usize) -> usize {
        self.v + self.s + k
    }
    pub fn degrees(&self) -> Vec<i32> {
        std::iter::repeat_n(-2, self.v)
            .chain(std::iter::repeat_n(-1, self.s))
            .chain(std::iter::repeat_n(0, self.h))
            .collect()
    }
    pub fn parities(&self, parity: Parity) -> Vec<bool> {
        let odd = parity == Parity::Symmetric;
        std::iter::repeat_n(false, self.v)
            .chain(std::iter::repeat_n(odd, self.s))
            .chain(std::iter::repeat_n(false, self.h))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct FlatModel {
    module: SpinorModule,
    kappa: SquaringMap,
    algebra: SuperAlgebra,
    layout: Layout,
}

impl FlatModel {
    /// Assembles the brackets and runs the Jacobi oracle.
    pub fn build(module: SpinorModule, kappa: SquaringMap) -> Result<Self, FlatModelError> {
        if !kappa.check_parity() {
            return Err(FlatModelError::WrongParity);
        }
        if let Some((k, a)) = kappa.equivariance_witness(&module) {
            return Err(FlatModelError::NotEquivariant { so_index: k, component: a });
        }
        let model = Self::assemble(module, kappa);
        let violations = model.algebra.super_jacobi_check();
        if let Some(v) = violations.first() {
            return Err(FlatModelError::Jacobi(v.triple));
        }
        Ok(model)
    }

    /// Assembles without verification.
    pub fn assemble(module: SpinorModule, kappa: SquaringMap) -> Self {
        let so = module.so_basis().clone();
        let layout = Layout { v: module.signature().dim(), s: module.dim(), h: so.len() };
        let mut alg = SuperAlgebra::new(layout.degrees(), layout.parities(kappa.parity));
        for k in 0..so.len() {
            let m = so.matrix(k).transpose();
            for c in 0..layout.v {
                let img: SparseVec = m.row(c).iter().map(|(a, x)| (layout.vi(*a), x.clone())).collect();
                alg.set_bracket(layout.hi(k), layout.vi(c), img);
            }
            let r = module.rho(k).transpose();
            for i in 0..layout.s {
                let img: SparseVec = r.row(i).iter().map(|(j, x)| (layout.si(*j), x.clone())).collect();
                alg.set_bracket(layout.hi(k), layout.si(i), img);
            }
            for l in k..so.len() {
                let c: SparseVec = sparse::from_dense(&so.bracket_coords(k, l))
                    .into_iter()
                    .map(|(m, x)| (layout.hi(m), x))
                    .collect();
                alg.set_bracket(layout.hi(k), layout.hi(l), c);
            }
        }
        for i in 0..layout.s {
            for j in i..layout.s {
                let v: SparseVec =
                    kappa.eval_basis(i, j).into_iter().map(|(a, x)| (layout.vi(a), x)).collect();
                alg.set_bracket(layout.si(i), layout.si(j), v);
            }
        }
        FlatModel { module, kappa, algebra: alg, layout }
    }

    /// Minimal module with the first squaring map of the requested parity.
    pub fn minimal(signature: Signature, parity: Parity) -> Result<Self, FlatModelError> {
        let module = SpinorModule::minimal(signature)?;
        let kappa = super::find_squaring_map(&module, parity).ok_or(FlatModelError::NoSquaringMap)?;
        Self::build(module, kappa)
    }

    pub fn module(&self) -> &SpinorModule {
        &self.module
    }

    pub fn kappa(&self) -> &SquaringMap {
        &self.kappa
    }

    pub fn algebra(&self) -> &SuperAlgebra {
        &self.algebra
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn signature(&self) -> &Signature {
        self.module.signature()
    }

    pub fn parity(&self) -> Parity {
        self.kappa.parity
    }
}

/// Serializable description of a flat model.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlatModelRecord {
    pub signature: Signature,
    pub extension: Extension,
    pub parity: Parity,
    pub layout: Layout,
    pub kappa: crate::exactla::RationalTensor,
    pub algebra: SuperAlgebra,
}

impl From<&FlatModel> for FlatModelRecord {
    fn from(m: &FlatModel) -> Self {
        FlatModelRecord {
            signature: *m.signature(),
            extension: m.module.extension(),
            parity: m.parity(),
            layout: m.layout,
            kappa: crate::exactla::RationalTensor::from_matrices(
                &m.kappa.components,
                m.layout.s,
                m.layout.s,
            ),
            algebra: m.algebra.clone(),
        }
    }
}

impl FlatModelRecord {
    /// Rebuilds the model and checks that the stored brackets are reproduced.
    pub fn rebuild(&self) -> Result<FlatModel, FlatModelError> {
        let module = SpinorModule::new(self.signature, self.extension)?;
        let components = self
            .kappa
            .to_matrices()
            .map_err(|e| FlatModelError::Structure(e.to_string()))?;
        let kappa = SquaringMap { parity: self.parity, components, provenance: "record".into() };
        let model = FlatModel::build(module, kappa)?;
        if model.layout != self.layout || model.algebra != self.algebra {
            return Err(FlatModelError::Structure("stored brackets differ from the rebuilt model".into()));
        }
        Ok(model)
    }
}

/// Rank of `κ` on `⊙²S′` (symmetric) or `⋀²S′` (skew), for `S′` spanned by `basis`.
pub fn restricted_kappa_rank(kappa: &SquaringMap, basis: &[SparseVec], sdim: usize) -> usize {
    let mut cols: Vec<SparseVec> = Vec::new();
    let dense: Vec<Vec<Rational>> = basis.iter().map(|b| sparse::to_dense(b, sdim)).collect();
    for i in 0..dense.len() {
        let start = if kappa.parity == Parity::Symmetric { i } else { i + 1 };
        for j in start..dense.len() {
            cols.push(sparse::from_dense(&kappa.eval(&dense[i], &dense[j])));
        }
    }
    let m = crate::exactla::SparseMatrix::from_columns(kappa.vdim(), &cols);
    crate::exactla::rank(&m)
}
