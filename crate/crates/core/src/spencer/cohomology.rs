//! The degree-`d` subcomplex, its differentials and cohomology.

use std::sync::OnceLock;

use serde::Serialize;

use super::complex::{dd_nonzeros, differential, CochainSpace, Host};
use crate::exactla::{kernel_basis, rank, SparseMatrix, SparseVec, Subspace};

/// Cochain spaces `C^{d,0..=max_p+1}` with lazily built differentials.
#[derive(Debug)]
pub struct SpencerComplex {
    host: Host,
    d: i32,
    spaces: Vec<CochainSpace>,
    differentials: Vec<OnceLock<SparseMatrix>>,
}

/// Dimensions of cocycles, coboundaries and cohomology in bidegree `(d,p)`.
#[derive(Clone, Debug, Serialize)]
pub struct CohomologyResult {
    pub d: i32,
    pub p: usize,
    pub dim_cochains: usize,
    pub dim_z: usize,
    pub dim_b: usize,
    pub dim_h: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_basis: Option<Subspace>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_basis: Option<Subspace>,
}

impl SpencerComplex {
    /// Builds the bases of `C^{d,p}` for `p ≤ max_p + 1`.
    pub fn new(host: Host, d: i32, max_p: usize) -> Self {
        let spaces: Vec<CochainSpace> = (0..=max_p + 1).map(|p| CochainSpace::new(&host, d, p)).collect();
        let differentials = (0..=max_p).map(|_| OnceLock::new()).collect();
        SpencerComplex { host, d, spaces, differentials }
    }

    pub fn host(&self) -> &Host {
        &self.host
    }

    pub fn degree(&self) -> i32 {
        self.d
    }

    pub fn max_p(&self) -> usize {
        self.differentials.len() - 1
    }

    pub fn space(&self, p: usize) -> &CochainSpace {
        &self.spaces[p]
    }

    /// `∂: C^{d,p} → C^{d,p+1}`.
    pub fn differential(&self, p: usize) -> &SparseMatrix {
        self.differentials[p].get_or_init(|| differential(&self.host, &self.spaces[p], &self.spaces[p + 1]))
    }

    /// Number of nonzero entries of `∂∘∂` starting at `C^{d,p}`.
    pub fn dd_nonzeros(&self, p: usize) -> usize {
        if p + 1 < self.differentials.len() {
            self.differential(p + 1)
                .matmul(self.differential(p))
                .expect("composable")
                .nnz()
        } else {
            dd_nonzeros(&self.host, self.d, p)
        }
    }

    pub fn cohomology(&self, p: usize, with_bases: bool) -> CohomologyResult {
        let dim_cochains = self.spaces[p].dim();
        let (dim_z, z_basis) = if dim_cochains == 0 {
            (0, with_bases.then(|| Subspace::zero(0)))
        } else if with_bases {
            let z = kernel_basis(self.differential(p));
            (z.dim(), Some(z))
        } else {
            (dim_cochains - rank(self.differential(p)), None)
        };
        let (dim_b, b_basis) = if p == 0 || self.spaces[p - 1].dim() == 0 || dim_cochains == 0 {
            (0, with_bases.then(|| Subspace::zero(dim_cochains)))
        } else if with_bases {
            let cols = self.differential(p - 1).transpose().into_rows();
            let b = Subspace::from_spanning(dim_cochains, &cols);
            (b.dim(), Some(b))
        } else {
            (rank(self.differential(p - 1)), None)
        };
        CohomologyResult { d: self.d, p, dim_cochains, dim_z, dim_b, dim_h: dim_z - dim_b, z_basis, b_basis }
    }

    /// Numbers of `V` and `S` arguments of a tuple.
    pub fn tuple_type(&self, tuple: &[u32]) -> (usize, usize) {
        let nv = tuple.iter().filter(|&&x| (x as usize) < self.host.layout.v).count();
        (nv, tuple.len() - nv)
    }

    /// Dimension of each block `Hom(⋀^{nv}V ⊗ ⊙^{ns}S, 𝔤_k)` of `C^{d,p}`.
    pub fn block_dims(&self, p: usize) -> Vec<((usize, usize), usize)> {
        let space = &self.spaces[p];
        let mut out: Vec<((usize, usize), usize)> = Vec::new();
        for (t, tuple) in space.tuples().iter().enumerate() {
            let ty = self.tuple_type(tuple);
            let n = space.outputs_of(t).len();
            match out.iter_mut().find(|(k, _)| *k == ty) {
                Some((_, c)) => *c += n,
                None => out.push((ty, n)),
            }
        }
        out.sort();
        out
    }

    /// Rows of `∂: C^{d,p} → C^{d,p+1}` whose input tuple has the given type.
    pub fn projected_differential(&self, p: usize, ty: (usize, usize)) -> SparseMatrix {
        let to = &self.spaces[p + 1];
        let d = self.differential(p);
        let rows: Vec<SparseVec> = to
            .tuples()
            .iter()
            .enumerate()
            .filter(|(_, u)| self.tuple_type(u) == ty)
            .flat_map(|(t, _)| {
                let lo = to.offset(t);
                (lo..lo + to.outputs_of(t).len()).map(|r| d.row(r).to_vec())
            })
            .collect();
        SparseMatrix::from_normalized_rows(d.ncols(), rows)
    }
}
