//! Rank, kernel and solve over the rationals.
//!
//! A matrix is first split into blocks of columns that never share a row.
//! Each block is handled independently: small blocks by exact Gauss-Jordan
//! elimination, large blocks by elimination modulo random primes (sparse
//! row insertion, or dense elimination after a random row compression when
//! the block is dense), followed by Chinese remaindering, rational
//! reconstruction and an exact check of every lifted kernel vector.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::modular::{random_primes, Crt, DenseModMatrix, Field};
use super::sparse::{self, axpy, SparseMatrix, SparseVec};
use super::{LinalgError, Rational, Subspace};

static MODULAR_DEFAULT: AtomicBool = AtomicBool::new(true);

/// Globally enables or disables modular acceleration for default options.
pub fn set_modular_default(on: bool) {
    MODULAR_DEFAULT.store(on, Ordering::Relaxed);
}

/// Tuning knobs for elimination. Results never depend on them.
#[derive(Clone, Copy, Debug)]
pub struct ElimOptions {
    pub modular: bool,
    pub seed: u64,
    /// Blocks with at most this many dense entries use exact elimination.
    pub dense_threshold: usize,
    /// Number of primes used for rank cross-checking.
    pub rank_primes: usize,
}

impl Default for ElimOptions {
    fn default() -> Self {
        ElimOptions {
            modular: MODULAR_DEFAULT.load(Ordering::Relaxed),
            seed: 0x5eed_2024,
            dense_threshold: 10_000,
            rank_primes: 2,
        }
    }
}

impl ElimOptions {
    pub fn exact() -> Self {
        ElimOptions { modular: false, ..Self::default() }
    }
}

/// A set of columns that share rows only among themselves, with its rows.
#[derive(Clone, Debug)]
pub struct Block {
    pub cols: Vec<usize>,
    pub rows: Vec<usize>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Splits the columns of `m` into connected blocks; ordered by smallest column.
pub fn column_blocks(m: &SparseMatrix) -> Vec<Block> {
    let n = m.ncols();
    let mut parent: Vec<usize> = (0..n).collect();
    for r in m.rows() {
        if let Some((first, _)) = r.first() {
            let mut a = find(&mut parent, *first);
            for (j, _) in &r[1..] {
                let b = find(&mut parent, *j);
                if a != b {
                    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                    parent[hi] = lo;
                    a = lo;
                }
            }
        }
    }
    let mut index: BTreeMap<usize, usize> = BTreeMap::new();
    let mut blocks: Vec<Block> = Vec::new();
    for c in 0..n {
        let root = find(&mut parent, c);
        let k = *index.entry(root).or_insert_with(|| {
            blocks.push(Block { cols: Vec::new(), rows: Vec::new() });
            blocks.len() - 1
        });
        blocks[k].cols.push(c);
    }
    for (i, r) in m.rows().iter().enumerate() {
        if let Some((first, _)) = r.first() {
            let root = find(&mut parent, *first);
            blocks[index[&root]].rows.push(i);
        }
    }
    blocks
}

fn block_matrix(m: &SparseMatrix, b: &Block) -> SparseMatrix {
    m.select_rows(&b.rows).select_columns(&b.cols)
}

/// Exact echelon basis of the row space keyed by leading column.
fn exact_echelon<'a>(
    rows: impl Iterator<Item = &'a SparseVec>,
    reduced: bool,
) -> BTreeMap<usize, SparseVec> {
    let mut basis: BTreeMap<usize, SparseVec> = BTreeMap::new();
    for r in rows {
        let mut v = r.clone();
        while let Some((k, x)) = v.first().cloned() {
            match basis.get(&k) {
                Some(b) => v = axpy(&v, &-x, b),
                None => break,
            }
        }
        if let Some((k, x)) = v.first().cloned() {
            let inv = x.recip();
            basis.insert(k, sparse::scale(&v, &inv));
        }
    }
    if reduced {
        let pivots: Vec<usize> = basis.keys().copied().collect();
        for &k in pivots.iter().rev() {
            let bk = basis[&k].clone();
            for &j in pivots.iter().take_while(|&&j| j < k) {
                let bj = &basis[&j];
                let x = sparse::get(bj, k);
                if !x.is_zero() {
                    let nb = axpy(bj, &-x, &bk);
                    basis.insert(j, nb);
                }
            }
        }
    }
    basis
}

/// Canonical kernel vectors from a reduced row echelon form, one per free column.
fn kernel_from_rref(ncols: usize, rref: &BTreeMap<usize, SparseVec>) -> Vec<SparseVec> {
    let mut is_pivot = vec![false; ncols];
    for &k in rref.keys() {
        is_pivot[k] = true;
    }
    let mut vecs: BTreeMap<usize, Vec<(usize, Rational)>> = (0..ncols)
        .filter(|&c| !is_pivot[c])
        .map(|c| (c, vec![(c, Rational::one())]))
        .collect();
    for (&p, row) in rref {
        for (f, x) in row {
            if !is_pivot[*f] {
                vecs.get_mut(f).expect("free column").push((p, -x));
            }
        }
    }
    vecs.into_values().map(sparse::normalize).collect()
}

fn to_mod(m: &SparseMatrix, f: &Field) -> Option<Vec<Vec<(usize, u64)>>> {
    m.rows()
        .iter()
        .map(|r| r.iter().map(|(j, x)| x.mod_p(f.p).map(|v| (*j, v))).collect())
        .collect()
}

/// Dense matrix over `f` whose row space equals that of `rows` with high
/// probability; tall inputs are compressed by a random linear combination.
fn compress(rows: &[Vec<(usize, u64)>], ncols: usize, f: &Field, rng: &mut ChaCha8Rng) -> DenseModMatrix {
    let target = ncols + 16;
    if rows.len() <= target {
        let mut d = DenseModMatrix::zeros(rows.len(), ncols);
        for (i, r) in rows.iter().enumerate() {
            let row = d.row_mut(i);
            for (j, v) in r {
                row[*j] = *v;
            }
        }
        return d;
    }
    let mut d = DenseModMatrix::zeros(target, ncols);
    for r in rows {
        for i in 0..target {
            let c = rng.gen_range(0..f.p);
            let row = d.row_mut(i);
            for (j, v) in r {
                row[*j] = f.reduce(row[*j] + c * *v);
            }
        }
    }
    d
}

/// Pivot rows (leading entry 1) of a row echelon form modulo `f.p`, indexed
/// by leading column, built by sparse row insertion with sparsest rows first.
fn sparse_echelon_mod(rows: &[Vec<(usize, u64)>], ncols: usize, f: &Field) -> Vec<Option<Vec<(usize, u64)>>> {
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by_key(|&i| rows[i].len());
    let mut pivots: Vec<Option<Vec<(usize, u64)>>> = vec![None; ncols];
    let mut work = vec![0u64; ncols];
    let mut rank = 0;
    for i in order {
        let r = &rows[i];
        let Some(&(lo, _)) = r.first() else { continue };
        for (j, v) in r {
            work[*j] = *v;
        }
        let mut lead = None;
        for c in lo..ncols {
            let x = work[c];
            if x == 0 {
                continue;
            }
            match &pivots[c] {
                Some(p) => {
                    let factor = f.neg(x);
                    for (j, v) in p {
                        work[*j] = f.reduce(work[*j] + factor * v);
                    }
                }
                None => {
                    lead = Some(c);
                    break;
                }
            }
        }
        if let Some(c) = lead {
            let inv = f.inv(work[c]);
            let mut row = Vec::new();
            for j in c..ncols {
                if work[j] != 0 {
                    row.push((j, f.mul(work[j], inv)));
                    work[j] = 0;
                }
            }
            pivots[c] = Some(row);
            rank += 1;
            if rank == ncols {
                break;
            }
        }
    }
    pivots
}

/// Whether a block is sparse enough for row insertion.
fn prefers_sparse(rows: &[Vec<(usize, u64)>], ncols: usize) -> bool {
    let nnz: usize = rows.iter().map(Vec::len).sum();
    nnz * 8 <= rows.len().max(1) * ncols
}

/// Pivot columns and, for each free column, the values of the pivot
/// variables in the kernel vector that is 1 there and 0 on other free columns.
fn mod_kernel_data(
    rows: &[Vec<(usize, u64)>],
    n: usize,
    f: &Field,
    rng: &mut ChaCha8Rng,
) -> (Vec<usize>, Vec<u64>) {
    if !prefers_sparse(rows, n) {
        let ech = compress(rows, n, f, rng).echelon(f, true);
        let pivots = ech.pivots;
        let mut is_pivot = vec![false; n];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut residues = Vec::new();
        for fc in (0..n).filter(|&c| !is_pivot[c]) {
            for r in 0..pivots.len() {
                residues.push(f.neg(ech.matrix.row(r)[fc]));
            }
        }
        return (pivots, residues);
    }
    let ech = sparse_echelon_mod(rows, n, f);
    let pivots: Vec<usize> = (0..n).filter(|&c| ech[c].is_some()).collect();
    let mut residues = Vec::new();
    let mut x = vec![0u64; n];
    for fc in (0..n).filter(|&c| ech[c].is_none()) {
        x.iter_mut().for_each(|v| *v = 0);
        x[fc] = 1;
        for &pc in pivots.iter().rev() {
            let row = ech[pc].as_ref().expect("pivot row");
            let mut acc = 0u64;
            for (j, v) in &row[1..] {
                if x[*j] != 0 {
                    acc = f.reduce(acc + f.mul(*v, x[*j]));
                }
            }
            x[pc] = f.neg(acc);
        }
        residues.extend(pivots.iter().map(|&pc| x[pc]));
    }
    (pivots, residues)
}

fn block_rank_mod(m: &SparseMatrix, p: u64, rng: &mut ChaCha8Rng) -> Option<usize> {
    let f = Field::new(p);
    let rows = to_mod(m, &f)?;
    if prefers_sparse(&rows, m.ncols()) {
        return Some(sparse_echelon_mod(&rows, m.ncols(), &f).iter().flatten().count());
    }
    let d = compress(&rows, m.ncols(), &f, rng);
    Some(d.echelon(&f, false).pivots.len())
}

/// Kernel of one block via primes; `None` if lifting did not verify.
fn block_kernel_mod(m: &SparseMatrix, opts: &ElimOptions, salt: u64) -> Option<Vec<SparseVec>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let n = m.ncols();
    let primes = random_primes(&mut rng, 24);
    let mut best: Option<(Vec<usize>, Crt, usize)> = None;
    for &p in &primes {
        let f = Field::new(p);
        let Some(rows) = to_mod(m, &f) else { continue };
        let (pivots, residues) = mod_kernel_data(&rows, n, &f, &mut rng);
        let better = match &best {
            None => true,
            Some((bp, _, _)) => pivots.len() > bp.len() || (pivots.len() == bp.len() && pivots < *bp),
        };
        if better {
            best = Some((pivots, Crt::new(p, &residues), 1));
        } else if let Some((bp, crt, count)) = &mut best {
            if *bp == pivots {
                crt.push(p, &residues);
                *count += 1;
            } else {
                continue;
            }
        }
        let (bp, crt, count) = best.as_ref().expect("set above");
        if *count < 2 {
            continue;
        }
        let Some(vals) = crt.reconstruct() else { continue };
        let free: Vec<usize> = {
            let mut is_pivot = vec![false; n];
            for &c in bp {
                is_pivot[c] = true;
            }
            (0..n).filter(|&c| !is_pivot[c]).collect()
        };
        let mut vecs = Vec::with_capacity(free.len());
        for (k, &fc) in free.iter().enumerate() {
            let mut v: Vec<(usize, Rational)> = vec![(fc, Rational::one())];
            for (r, &pc) in bp.iter().enumerate() {
                let x = &vals[k * bp.len() + r];
                if !x.is_zero() {
                    v.push((pc, x.clone()));
                }
            }
            vecs.push(sparse::normalize(v));
        }
        if vecs.iter().all(|v| m.mul_sparse_vec(v).is_empty()) {
            return Some(vecs);
        }
    }
    None
}

fn lift_block(vecs: Vec<SparseVec>, cols: &[usize]) -> Vec<SparseVec> {
    vecs.into_iter()
        .map(|v| v.into_iter().map(|(j, x)| (cols[j], x)).collect())
        .collect()
}

fn block_kernel(m: &SparseMatrix, opts: &ElimOptions, salt: u64) -> Vec<SparseVec> {
    let small = m.nrows().saturating_mul(m.ncols()) <= opts.dense_threshold;
    if opts.modular && !small {
        if let Some(v) = block_kernel_mod(m, opts, salt) {
            return v;
        }
    }
    kernel_from_rref(m.ncols(), &exact_echelon(m.rows().iter(), true))
}

fn block_rank(m: &SparseMatrix, opts: &ElimOptions, salt: u64) -> usize {
    let small = m.nrows().saturating_mul(m.ncols()) <= opts.dense_threshold;
    if !opts.modular || small {
        return exact_echelon(m.rows().iter(), false).len();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ salt.wrapping_mul(0xd134_2543_de82_ef95));
    let mut ranks = Vec::new();
    for p in random_primes(&mut rng.clone(), 16) {
        if let Some(r) = block_rank_mod(m, p, &mut rng) {
            ranks.push(r);
            if ranks.len() == opts.rank_primes.max(2) {
                break;
            }
        }
    }
    let agree = ranks.len() >= 2 && ranks.iter().all(|&r| r == ranks[0]);
    if agree {
        return ranks[0];
    }
    // Disagreement: a verified kernel of size k bounds the rank above by
    // cols - k, and the largest modular rank bounds it below.
    let lower = ranks.iter().copied().max().unwrap_or(0);
    if let Some(k) = block_kernel_mod(m, opts, salt) {
        if m.ncols() - k.len() == lower {
            return lower;
        }
    }
    exact_echelon(m.rows().iter(), false).len()
}

/// Rank over ℚ.
pub fn rank(m: &SparseMatrix) -> usize {
    rank_with(m, &ElimOptions::default())
}

/// Rank over ℚ by exact elimination only.
pub fn rank_exact(m: &SparseMatrix) -> usize {
    rank_with(m, &ElimOptions::exact())
}

pub fn rank_with(m: &SparseMatrix, opts: &ElimOptions) -> usize {
    let blocks = column_blocks(m);
    blocks
        .par_iter()
        .enumerate()
        .filter(|(_, b)| !b.rows.is_empty())
        .map(|(k, b)| block_rank(&block_matrix(m, b), opts, k as u64))
        .sum()
}

/// Canonical basis of the kernel of `m`.
pub fn kernel_basis(m: &SparseMatrix) -> Subspace {
    kernel_basis_with(m, &ElimOptions::default())
}

pub fn kernel_basis_with(m: &SparseMatrix, opts: &ElimOptions) -> Subspace {
    let blocks = column_blocks(m);
    let parts: Vec<Vec<SparseVec>> = blocks
        .par_iter()
        .enumerate()
        .map(|(k, b)| {
            if b.rows.is_empty() {
                return b.cols.iter().map(|&c| vec![(c, Rational::one())]).collect();
            }
            lift_block(block_kernel(&block_matrix(m, b), opts, k as u64), &b.cols)
        })
        .collect();
    let mut vecs: Vec<SparseVec> = parts.into_iter().flatten().collect();
    vecs.sort_by_key(|v| v.last().map(|(j, _)| *j));
    Subspace::from_canonical(m.ncols(), vecs)
}

/// Echelon-deterministic particular solution of `m x = b`.
pub fn solve(m: &SparseMatrix, b: &[Rational]) -> Result<Vec<Rational>, LinalgError> {
    if b.len() != m.nrows() {
        return Err(LinalgError::Shape(format!("rhs length {} vs {} rows", b.len(), m.nrows())));
    }
    let n = m.ncols();
    let rows: Vec<Vec<(usize, Rational)>> = m
        .rows()
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut row = r.clone();
            if !bi.is_zero() {
                row.push((n, -bi));
            }
            row
        })
        .collect();
    let aug = SparseMatrix::from_normalized_rows(n + 1, rows);
    let blocks = column_blocks(&aug);
    let (k, block) = blocks
        .iter()
        .enumerate()
        .find(|(_, blk)| blk.cols.last() == Some(&n))
        .expect("last column belongs to a block");
    let opts = ElimOptions::default();
    let kernel = if block.rows.is_empty() {
        vec![vec![(block.cols.len() - 1, Rational::one())]]
    } else {
        block_kernel(&block_matrix(&aug, block), &opts, k as u64)
    };
    let local_last = block.cols.len() - 1;
    let sol = kernel
        .into_iter()
        .find(|v| v.last().map(|(j, _)| *j) == Some(local_last))
        .ok_or(LinalgError::NoSolution)?;
    let mut x = vec![Rational::zero(); n];
    for (j, val) in sol {
        let c = block.cols[j];
        if c < n {
            x[c] = val;
        }
    }
    Ok(x)
}

/// Common kernel of a family of square operators on a space of dimension `dim`.
pub fn common_annihilated(ops: &[SparseMatrix], dim: usize) -> Result<Subspace, LinalgError> {
    if ops.iter().any(|o| o.nrows() != dim || o.ncols() != dim) {
        return Err(LinalgError::Shape("operators must be square of the given size".into()));
    }
    if ops.is_empty() {
        return Ok(Subspace::full(dim));
    }
    let refs: Vec<&SparseMatrix> = ops.iter().collect();
    Ok(kernel_basis(&SparseMatrix::vstack(&refs)?))
}

/// Exact reverse echelon basis of the span of `vecs` (pivot = last nonzero).
pub(crate) fn reverse_echelon(dim: usize, vecs: &[SparseVec]) -> Vec<SparseVec> {
    let flip = |v: &SparseVec| -> SparseVec {
        let mut w: SparseVec = v.iter().map(|(j, x)| (dim - 1 - j, x.clone())).collect();
        w.reverse();
        w
    };
    let flipped: Vec<SparseVec> = vecs.iter().map(flip).collect();
    let basis = exact_echelon(flipped.iter(), true);
    let mut out: Vec<SparseVec> = basis.values().map(flip).collect();
    out.sort_by_key(|v| v.last().map(|(j, _)| *j));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::q;

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&SparseMatrix::identity(2)), 2);
        assert_eq!(rank(&SparseMatrix::zeros(3, 5)), 0);
        assert_eq!(rank(&SparseMatrix::from_ints(&[&[1, 2], &[2, 4]])), 1);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_basis(&SparseMatrix::identity(3)).dim(), 0);
        assert_eq!(kernel_basis(&SparseMatrix::zeros(2, 3)).dim(), 3);
        let k = kernel_basis(&SparseMatrix::from_ints(&[&[1, 1, 0]]));
        assert_eq!(k.pivots(), vec![1, 2]);
    }

    #[test]
    fn blocks_merge_through_stale_roots() {
        // In the last row column 2 first joins root 0, then root 1 < 2 must
        // join the merged set rather than re-parent column 2.
        let m = SparseMatrix::from_ints(&[&[0, 1, 0, 0, 1], &[1, 0, 0, 1, 0], &[0, 0, 1, 1, 1]]);
        let blocks = column_blocks(&m);
        assert_eq!(blocks.len(), 1, "{blocks:?}");
    }

    proptest::proptest! {
        #[test]
        fn rows_stay_inside_one_block(
            rows in proptest::collection::vec(proptest::collection::vec(-1i64..=1, 9), 1..9),
        ) {
            let dense: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|&x| Rational::from_int(x)).collect()).collect();
            let m = SparseMatrix::from_dense(&dense, 9);
            let mut owner = vec![usize::MAX; 9];
            for (k, b) in column_blocks(&m).iter().enumerate() {
                for &c in &b.cols {
                    owner[c] = k;
                }
            }
            for r in m.rows() {
                proptest::prop_assert!(r.iter().all(|(j, _)| owner[*j] == owner[r[0].0]));
            }
            for v in kernel_basis(&m).basis() {
                proptest::prop_assert!(m.mul_sparse_vec(v).is_empty());
            }
        }
    }

    #[test]
    fn solve_examples() {
        let b = vec![q(1, 1), q(-2, 3)];
        assert_eq!(solve(&SparseMatrix::identity(2), &b).unwrap(), b);
        assert_eq!(
            solve(&SparseMatrix::zeros(2, 2), &b).unwrap_err(),
            LinalgError::NoSolution
        );
        let x = solve(&SparseMatrix::from_ints(&[&[2]]), &[q(3, 1)]).unwrap();
        assert_eq!(x, vec![q(3, 2)]);
    }

    #[test]
    fn common_annihilated_examples() {
        assert_eq!(common_annihilated(&[], 4).unwrap().dim(), 4);
        assert_eq!(common_annihilated(&[SparseMatrix::identity(3)], 3).unwrap().dim(), 0);
        // diag(1,0,0) and diag(0,1,0) commute; common kernel is span(e3).
        let p1 = SparseMatrix::from_ints(&[&[1, 0, 0], &[0, 0, 0], &[0, 0, 0]]);
        let p2 = SparseMatrix::from_ints(&[&[0, 0, 0], &[0, 1, 0], &[0, 0, 0]]);
        let s = common_annihilated(&[p1.clone(), p2.clone()], 3).unwrap();
        assert_eq!(s.dim(), 1);
        for v in s.basis() {
            assert!(p1.mul_sparse_vec(v).is_empty() && p2.mul_sparse_vec(v).is_empty());
        }
    }

    #[test]
    fn modular_path_matches_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let base: Vec<Vec<i64>> = (0..20)
            .map(|_| (0..30).map(|_| rng.gen_range(-3..=3)).collect())
            .collect();
        let mut rows = base.clone();
        for i in 0..20 {
            rows.push(base[i].iter().zip(&base[(i + 1) % 20]).map(|(a, b)| a - 2 * b).collect());
        }
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        let m = SparseMatrix::from_ints(&refs);
        let modular = ElimOptions { dense_threshold: 100, ..ElimOptions::default() };
        assert!(modular.modular);
        assert_eq!(rank_with(&m, &modular), rank_exact(&m));
        let k = kernel_basis_with(&m, &modular);
        assert_eq!(k, kernel_basis_with(&m, &ElimOptions::exact()));
        assert_eq!(k.dim() + rank_exact(&m), 30);
    }

    #[test]
    fn sparse_modular_path_matches_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let trip: Vec<(usize, usize, Rational)> = (0..150)
            .map(|_| (rng.gen_range(0..80), rng.gen_range(0..50), q(rng.gen_range(-4..=4), rng.gen_range(1..=3))))
            .collect();
        let m = SparseMatrix::from_triplets(80, 50, trip);
        let opts = ElimOptions { dense_threshold: 100, ..ElimOptions::default() };
        assert_eq!(rank_with(&m, &opts), rank_exact(&m));
        assert_eq!(kernel_basis_with(&m, &opts), kernel_basis_with(&m, &ElimOptions::exact()));
    }
}

