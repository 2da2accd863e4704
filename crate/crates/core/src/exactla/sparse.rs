//! Row-compressed sparse rational matrices and sparse vectors.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{LinalgError, Rational};

/// Sparse vector: strictly increasing indices, no stored zeros.
pub type SparseVec = Vec<(usize, Rational)>;

/// Sorts, merges duplicates and drops zeros.
pub fn normalize(mut v: Vec<(usize, Rational)>) -> SparseVec {
    v.sort_by_key(|(i, _)| *i);
    let mut out: SparseVec = Vec::with_capacity(v.len());
    for (i, x) in v {
        match out.last_mut() {
            Some((j, y)) if *j == i => *y += x,
            _ => out.push((i, x)),
        }
    }
    out.retain(|(_, x)| !x.is_zero());
    out
}

/// `a + f * b`.
pub fn axpy(a: &[(usize, Rational)], f: &Rational, b: &[(usize, Rational)]) -> SparseVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, f * &b[j].1));
            j += 1;
        } else {
            let x = &a[i].1 + &(f * &b[j].1);
            if !x.is_zero() {
                out.push((a[i].0, x));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn scale(a: &[(usize, Rational)], f: &Rational) -> SparseVec {
    if f.is_zero() {
        return Vec::new();
    }
    a.iter().map(|(i, x)| (*i, x * f)).collect()
}

pub fn get(a: &[(usize, Rational)], idx: usize) -> Rational {
    match a.binary_search_by_key(&idx, |(i, _)| *i) {
        Ok(k) => a[k].1.clone(),
        Err(_) => Rational::zero(),
    }
}

pub fn to_dense(a: &[(usize, Rational)], n: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); n];
    for (i, x) in a {
        out[*i] = x.clone();
    }
    out
}

pub fn from_dense(v: &[Rational]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub fn dot_dense(a: &[(usize, Rational)], v: &[Rational]) -> Rational {
    a.iter()
        .filter(|(i, _)| !v[*i].is_zero())
        .map(|(i, x)| x * &v[*i])
        .sum()
}

pub fn dot(a: &[(usize, Rational)], b: &[(usize, Rational)]) -> Rational {
    let (mut i, mut j) = (0, 0);
    let mut acc = Rational::zero();
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += &a[i].1 * &b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

/// Sparse rational matrix stored by rows.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    rows: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix { nrows, ncols, rows: vec![Vec::new(); nrows] }
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n).map(|i| vec![(i, Rational::one())]).collect();
        SparseMatrix { nrows: n, ncols: n, rows }
    }

    pub fn scalar(n: usize, c: &Rational) -> Self {
        Self::identity(n).scale(c)
    }

    /// Builds from rows; each row is normalized.
    pub fn from_rows(ncols: usize, rows: Vec<Vec<(usize, Rational)>>) -> Self {
        let rows: Vec<SparseVec> = rows.into_iter().map(normalize).collect();
        debug_assert!(rows.iter().all(|r| r.last().is_none_or(|(j, _)| *j < ncols)));
        SparseMatrix { nrows: rows.len(), ncols, rows }
    }

    /// Builds from rows that are already normalized.
    pub fn from_normalized_rows(ncols: usize, rows: Vec<SparseVec>) -> Self {
        SparseMatrix { nrows: rows.len(), ncols, rows }
    }

    pub fn from_dense(rows: &[Vec<Rational>], ncols: usize) -> Self {
        let rows: Vec<SparseVec> = rows.iter().map(|r| from_dense(r)).collect();
        SparseMatrix { nrows: rows.len(), ncols, rows }
    }

    /// Convenience constructor from integer rows.
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let ncols = rows.first().map_or(0, |r| r.len());
        let dense: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Rational::from_int(x)).collect())
            .collect();
        Self::from_dense(&dense, ncols)
    }

    /// Sums duplicate entries and drops zeros.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        entries: impl IntoIterator<Item = (usize, usize, Rational)>,
    ) -> Self {
        let mut rows: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); nrows];
        for (i, j, x) in entries {
            assert!(i < nrows && j < ncols, "triplet out of range");
            rows[i].push((j, x));
        }
        Self::from_rows(ncols, rows)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row(&self, i: usize) -> &[(usize, Rational)] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<SparseVec> {
        self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        get(&self.rows[i], j)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &Rational)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |(j, x)| (i, *j, x)))
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        self.rows.iter().map(|r| to_dense(r, self.ncols)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut rows: Vec<SparseVec> = vec![Vec::new(); self.ncols];
        for (i, r) in self.rows.iter().enumerate() {
            for (j, x) in r {
                rows[*j].push((i, x.clone()));
            }
        }
        SparseMatrix { nrows: self.ncols, ncols: self.nrows, rows }
    }

    pub fn column(&self, j: usize) -> SparseVec {
        self.rows
            .iter()
            .enumerate()
            .filter_map(|(i, r)| {
                let x = get(r, j);
                (!x.is_zero()).then_some((i, x))
            })
            .collect()
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.ncols, "mul_vec shape");
        self.rows.iter().map(|r| dot_dense(r, v)).collect()
    }

    pub fn mul_sparse_vec(&self, v: &[(usize, Rational)]) -> SparseVec {
        self.rows
            .iter()
            .enumerate()
            .filter_map(|(i, r)| {
                let x = dot(r, v);
                (!x.is_zero()).then_some((i, x))
            })
            .collect()
    }

    /// `selfᵀ v` without materializing the transpose.
    pub fn tmul_sparse_vec(&self, v: &[(usize, Rational)]) -> SparseVec {
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        for (i, c) in v {
            for (j, x) in &self.rows[*i] {
                *acc.entry(*j).or_default() += c * x;
            }
        }
        acc.into_iter().filter(|(_, x)| !x.is_zero()).collect()
    }

    pub fn matmul(&self, other: &SparseMatrix) -> Result<SparseMatrix, LinalgError> {
        if self.ncols != other.nrows {
            return Err(LinalgError::Shape(format!(
                "{}x{} times {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut acc: Vec<(usize, Rational)> = Vec::new();
                for (k, x) in r {
                    for (j, y) in &other.rows[*k] {
                        acc.push((*j, x * y));
                    }
                }
                normalize(acc)
            })
            .collect();
        Ok(SparseMatrix { nrows: self.nrows, ncols: other.ncols, rows })
    }

    /// Matrix product; panics on a shape mismatch.
    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        self.matmul(other).expect("matrix product shape")
    }

    pub fn add(&self, other: &SparseMatrix) -> SparseMatrix {
        self.add_scaled(&Rational::one(), other)
    }

    pub fn sub(&self, other: &SparseMatrix) -> SparseMatrix {
        self.add_scaled(&-Rational::one(), other)
    }

    /// `self + f * other`.
    pub fn add_scaled(&self, f: &Rational, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols), "add shape");
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| axpy(a, f, b))
            .collect();
        SparseMatrix { nrows: self.nrows, ncols: self.ncols, rows }
    }

    pub fn scale(&self, f: &Rational) -> SparseMatrix {
        let rows = self.rows.iter().map(|r| scale(r, f)).collect();
        SparseMatrix { nrows: self.nrows, ncols: self.ncols, rows }
    }

    pub fn neg(&self) -> SparseMatrix {
        self.scale(&-Rational::one())
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &SparseMatrix) -> SparseMatrix {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn vstack(blocks: &[&SparseMatrix]) -> Result<SparseMatrix, LinalgError> {
        let ncols = blocks.first().map_or(0, |b| b.ncols);
        if blocks.iter().any(|b| b.ncols != ncols) {
            return Err(LinalgError::Shape("vstack column mismatch".into()));
        }
        let rows: Vec<SparseVec> = blocks.iter().flat_map(|b| b.rows.iter().cloned()).collect();
        Ok(SparseMatrix { nrows: rows.len(), ncols, rows })
    }

    pub fn hstack(blocks: &[&SparseMatrix]) -> Result<SparseMatrix, LinalgError> {
        let nrows = blocks.first().map_or(0, |b| b.nrows);
        if blocks.iter().any(|b| b.nrows != nrows) {
            return Err(LinalgError::Shape("hstack row mismatch".into()));
        }
        let mut rows: Vec<SparseVec> = vec![Vec::new(); nrows];
        let mut offset = 0;
        for b in blocks {
            for (i, r) in b.rows.iter().enumerate() {
                rows[i].extend(r.iter().map(|(j, x)| (j + offset, x.clone())));
            }
            offset += b.ncols;
        }
        Ok(SparseMatrix { nrows, ncols: offset, rows })
    }

    pub fn push_row(&mut self, row: Vec<(usize, Rational)>) {
        let row = normalize(row);
        debug_assert!(row.last().is_none_or(|(j, _)| *j < self.ncols));
        self.rows.push(row);
        self.nrows += 1;
    }

    /// Keeps only the listed columns, renumbered in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> SparseMatrix {
        let mut map = vec![usize::MAX; self.ncols];
        for (k, &c) in cols.iter().enumerate() {
            map[c] = k;
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                normalize(
                    r.iter()
                        .filter(|(j, _)| map[*j] != usize::MAX)
                        .map(|(j, x)| (map[*j], x.clone()))
                        .collect(),
                )
            })
            .collect();
        SparseMatrix { nrows: self.nrows, ncols: cols.len(), rows }
    }

    pub fn select_rows(&self, idx: &[usize]) -> SparseMatrix {
        let rows: Vec<SparseVec> = idx.iter().map(|&i| self.rows[i].clone()).collect();
        SparseMatrix { nrows: rows.len(), ncols: self.ncols, rows }
    }

    /// Drops rows with no entries.
    pub fn without_zero_rows(&self) -> SparseMatrix {
        let rows: Vec<SparseVec> = self.rows.iter().filter(|r| !r.is_empty()).cloned().collect();
        SparseMatrix { nrows: rows.len(), ncols: self.ncols, rows }
    }

    /// Matrix whose columns are the given sparse vectors.
    pub fn from_columns(nrows: usize, cols: &[SparseVec]) -> SparseMatrix {
        let mut rows: Vec<SparseVec> = vec![Vec::new(); nrows];
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c {
                rows[*i].push((j, x.clone()));
            }
        }
        SparseMatrix { nrows, ncols: cols.len(), rows }
    }

    /// Trace of a square matrix.
    pub fn trace(&self) -> Rational {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).sum()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &SparseMatrix) -> SparseMatrix {
        let nrows = self.nrows * other.nrows;
        let ncols = self.ncols * other.ncols;
        let mut rows: Vec<SparseVec> = Vec::with_capacity(nrows);
        for ra in &self.rows {
            for rb in &other.rows {
                let mut row = Vec::with_capacity(ra.len() * rb.len());
                for (ja, xa) in ra {
                    for (jb, xb) in rb {
                        row.push((ja * other.ncols + jb, xa * xb));
                    }
                }
                rows.push(row);
            }
        }
        SparseMatrix { nrows, ncols, rows }
    }

    /// Block-diagonal sum.
    pub fn direct_sum(blocks: &[&SparseMatrix]) -> SparseMatrix {
        let ncols: usize = blocks.iter().map(|b| b.ncols).sum();
        let mut rows = Vec::new();
        let mut offset = 0;
        for b in blocks {
            for r in &b.rows {
                rows.push(r.iter().map(|(j, x)| (j + offset, x.clone())).collect());
            }
            offset += b.ncols;
        }
        SparseMatrix { nrows: rows.len(), ncols, rows }
    }
}
