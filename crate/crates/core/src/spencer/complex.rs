//! Spencer cochains `Hom(⋀ᵖ𝔤₋, 𝔤)_d` and their differential.
//!
//! A cochain basis element is a pair (canonical input tuple, output basis
//! element). Canonical tuples list negative-degree basis indices in
//! increasing order; even elements appear at most once, odd ones may repeat
//! (super-alternating maps are symmetric in odd arguments). The output
//! degree is `d` plus the input degrees.
//!
//! The differential is
//! `(∂φ)(x₁..x_{p+1}) = Σᵢ σᵢ (−1)^{|φ||xᵢ|} [xᵢ, φ(..x̂ᵢ..)] − Σ_{i<j} σᵢⱼ φ([xᵢ,xⱼ], ..x̂ᵢ..x̂ⱼ..)`
//! where `σ` is the Koszul sign of moving the named arguments to the front,
//! each transposition of neighbours `x, y` contributing `−(−1)^{|x||y|}`.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::exactla::{Rational, SparseMatrix, SparseVec};
use crate::flatmodel::{FlatModel, Layout, SuperAlgebra};

/// A graded algebra `𝔤₋₂ ⊕ 𝔤₋₁ ⊕ 𝔤₀` laid out as `V ⊕ S ⊕ 𝔥`.
#[derive(Clone, Debug)]
pub struct Host {
    pub algebra: SuperAlgebra,
    pub layout: Layout,
}

impl Host {
    pub fn new(algebra: SuperAlgebra, layout: Layout) -> Self {
        assert_eq!(algebra.dim(), layout.dim());
        Host { algebra, layout }
    }

    pub fn from_flat(model: &FlatModel) -> Self {
        Host { algebra: model.algebra().clone(), layout: model.layout() }
    }

    /// Number of negative-degree basis elements.
    pub fn minus_dim(&self) -> usize {
        self.layout.v + self.layout.s
    }

    fn odd(&self, i: u32) -> bool {
        self.algebra.is_odd(i as usize)
    }

    fn deg(&self, i: u32) -> i32 {
        self.algebra.degree(i as usize)
    }

    /// Sign of swapping neighbours `x, y`.
    fn swap_sign(&self, x: u32, y: u32) -> i64 {
        if self.odd(x) && self.odd(y) {
            1
        } else {
            -1
        }
    }

    /// Sorts a tuple into canonical order; `None` when it vanishes.
    pub fn canonicalize(&self, tuple: &mut [u32]) -> Option<i64> {
        let mut sign = 1i64;
        for i in 1..tuple.len() {
            let mut j = i;
            while j > 0 && tuple[j - 1] > tuple[j] {
                sign *= self.swap_sign(tuple[j - 1], tuple[j]);
                tuple.swap(j - 1, j);
                j -= 1;
            }
        }
        if tuple.windows(2).any(|w| w[0] == w[1] && !self.odd(w[0])) {
            return None;
        }
        Some(sign)
    }
}

/// Basis of `C^{d,p}`.
#[derive(Clone, Debug)]
pub struct CochainSpace {
    pub d: i32,
    pub p: usize,
    tuples: Vec<Vec<u32>>,
    tuple_index: HashMap<Vec<u32>, usize>,
    offsets: Vec<usize>,
    outputs: BTreeMap<i32, Vec<usize>>,
    output_pos: Vec<usize>,
    output_deg: Vec<i32>,
    dim: usize,
}

fn canonical_tuples(host: &Host, p: usize) -> Vec<Vec<u32>> {
    fn rec(host: &Host, p: usize, start: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for x in start..host.minus_dim() as u32 {
            cur.push(x);
            let next = if host.odd(x) { x } else { x + 1 };
            rec(host, p, next, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(host, p, 0, &mut Vec::new(), &mut out);
    out
}

impl CochainSpace {
    pub fn new(host: &Host, d: i32, p: usize) -> Self {
        let n = host.algebra.dim();
        let mut outputs: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
        let mut output_pos = vec![0; n];
        for o in 0..n {
            let list = outputs.entry(host.algebra.degree(o)).or_default();
            output_pos[o] = list.len();
            list.push(o);
        }
        let mut tuples = Vec::new();
        let mut offsets = Vec::new();
        let mut output_deg = Vec::new();
        let mut dim = 0;
        for t in canonical_tuples(host, p) {
            let od = d + t.iter().map(|&x| host.deg(x)).sum::<i32>();
            if let Some(list) = outputs.get(&od) {
                offsets.push(dim);
                output_deg.push(od);
                dim += list.len();
                tuples.push(t);
            }
        }
        let tuple_index = tuples.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        CochainSpace { d, p, tuples, tuple_index, offsets, outputs, output_pos, output_deg, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tuples(&self) -> &[Vec<u32>] {
        &self.tuples
    }

    /// Output basis elements allowed for tuple number `t`.
    pub fn outputs_of(&self, t: usize) -> &[usize] {
        &self.outputs[&self.output_deg[t]]
    }

    pub fn tuple_position(&self, tuple: &[u32]) -> Option<usize> {
        self.tuple_index.get(tuple).copied()
    }

    /// Column of the basis cochain sending `tuple` (canonical) to `out`.
    pub fn index(&self, tuple: &[u32], out: usize) -> Option<usize> {
        let t = *self.tuple_index.get(tuple)?;
        let list = self.outputs_of(t);
        let pos = self.output_pos[out];
        (list.get(pos) == Some(&out)).then(|| self.offsets[t] + pos)
    }

    /// Inverse of [`CochainSpace::index`].
    pub fn element(&self, col: usize) -> (&[u32], usize) {
        let t = match self.offsets.binary_search(&col) {
            Ok(t) => {
                // Skip tuples with no outputs (none exist, offsets are strictly increasing).
                t
            }
            Err(t) => t - 1,
        };
        (&self.tuples[t], self.outputs_of(t)[col - self.offsets[t]])
    }

    pub fn offset(&self, t: usize) -> usize {
        self.offsets[t]
    }
}

/// Contribution map for one canonical tuple `U` of `C^{d,p+1}`:
/// `(output, source column) → coefficient`.
fn differential_at(
    host: &Host,
    from: &CochainSpace,
    u: &[u32],
) -> BTreeMap<(usize, usize), Rational> {
    let mut acc: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    let p1 = u.len();
    // First sum: σᵢ (−1)^{|φ||xᵢ|} [xᵢ, φ(rest)].
    for i in 0..p1 {
        let x = u[i];
        let sigma: i64 = (0..i).map(|k| host.swap_sign(x, u[k])).product();
        let rest: Vec<u32> = u.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &y)| y).collect();
        let Some(t) = from.tuple_position(&rest) else { continue };
        let rest_odd = rest.iter().filter(|&&y| host.odd(y)).count();
        for &o in from.outputs_of(t) {
            let phi_odd = (rest_odd + host.algebra.is_odd(o) as usize) % 2 == 1;
            let sign = if phi_odd && host.odd(x) { -sigma } else { sigma };
            let col = from.offset(t) + from.output_pos[o];
            for (k, c) in host.algebra.bracket_basis(x as usize, o) {
                *acc.entry((*k, col)).or_default() += c * &Rational::from_int(sign);
            }
        }
    }
    // Second sum: −σᵢⱼ φ([xᵢ,xⱼ], rest).
    for i in 0..p1 {
        for j in i + 1..p1 {
            let br = host.algebra.bracket_basis(u[i] as usize, u[j] as usize);
            if br.is_empty() {
                continue;
            }
            let (x, y) = (u[i], u[j]);
            let s_i: i64 = (0..i).map(|k| host.swap_sign(x, u[k])).product();
            let s_j: i64 = (0..j).filter(|&k| k != i).map(|k| host.swap_sign(y, u[k])).product();
            let sigma = s_i * s_j;
            let rest: Vec<u32> = u
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i && k != j)
                .map(|(_, &z)| z)
                .collect();
            for (m, c) in br {
                debug_assert!(*m < host.minus_dim());
                let mut tuple = Vec::with_capacity(rest.len() + 1);
                tuple.push(*m as u32);
                tuple.extend_from_slice(&rest);
                let Some(tau) = host.canonicalize(&mut tuple) else { continue };
                let Some(t) = from.tuple_position(&tuple) else { continue };
                let coef = c * &Rational::from_int(-sigma * tau);
                for &o in from.outputs_of(t) {
                    let col = from.offset(t) + from.output_pos[o];
                    *acc.entry((o, col)).or_default() += &coef;
                }
            }
        }
    }
    acc
}

/// Rows of `∂` for the canonical tuple number `ti` of `to`, one per output.
fn differential_rows(host: &Host, from: &CochainSpace, to: &CochainSpace, ti: usize) -> Vec<SparseVec> {
    let u = &to.tuples[ti];
    let outs = to.outputs_of(ti);
    let mut rows: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); outs.len()];
    for ((k, col), c) in differential_at(host, from, u) {
        if !c.is_zero() {
            rows[to.output_pos[k]].push((col, c));
        }
    }
    rows
}

/// Matrix of `∂: C^{d,p} → C^{d,p+1}`.
pub fn differential(host: &Host, from: &CochainSpace, to: &CochainSpace) -> SparseMatrix {
    assert_eq!(from.d, to.d);
    assert_eq!(from.p + 1, to.p);
    let rows: Vec<SparseVec> = (0..to.tuples.len())
        .into_par_iter()
        .flat_map_iter(|ti| differential_rows(host, from, to, ti))
        .collect();
    SparseMatrix::from_normalized_rows(from.dim, rows)
}

/// Checks `∂ ∘ ∂ = 0` on `C^{d,p}` exactly, streaming the rows of the
/// second differential instead of storing it. Returns the number of
/// nonzero entries of the composite.
pub fn dd_nonzeros(host: &Host, d: i32, p: usize) -> usize {
    let c0 = CochainSpace::new(host, d, p);
    let c1 = CochainSpace::new(host, d, p + 1);
    let c2 = CochainSpace::new(host, d, p + 2);
    let first = differential(host, &c0, &c1);
    (0..c2.tuples.len())
        .into_par_iter()
        .map(|ti| {
            differential_rows(host, &c1, &c2, ti)
                .iter()
                .map(|row| {
                    let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
                    for (c, x) in row {
                        for (j, y) in first.row(*c) {
                            *acc.entry(*j).or_default() += x * y;
                        }
                    }
                    acc.values().filter(|v| !v.is_zero()).count()
                })
                .sum::<usize>()
        })
        .sum()
}

/// Evaluates a cochain (coordinate vector on `space`) on an arbitrary tuple
/// of negative-degree basis elements, returning a vector in `𝔤`.
pub fn evaluate(host: &Host, space: &CochainSpace, phi: &[(usize, Rational)], tuple: &[u32]) -> SparseVec {
    let mut t = tuple.to_vec();
    let Some(sign) = host.canonicalize(&mut t) else { return Vec::new() };
    let Some(ti) = space.tuple_position(&t) else { return Vec::new() };
    let lo = space.offset(ti);
    let outs = space.outputs_of(ti);
    let hi = lo + outs.len();
    let start = phi.partition_point(|(c, _)| *c < lo);
    phi[start..]
        .iter()
        .take_while(|(c, _)| *c < hi)
        .map(|(c, x)| (outs[c - lo], x * &Rational::from_int(sign)))
        .collect()
}
