//! The Jacobi identities of a deformed bracket, split by filtration degree.
//!
//! A bracket on `V ⊕ S′ ⊕ 𝔥` decomposes as `μ₀ + μ₂ + μ₄`, where `μₙ` raises
//! the degree by `n`: `μ₂` collects `α, β, γ, δ` and `μ₄` is `θ`. The
//! Jacobiator of `μ` splits into the parts of degree `n = a + b` coming from
//! `μ_b(−, μ_a(−,−))`; each part, restricted to one type of argument triple,
//! is one of the named equations below.

use rayon::prelude::*;
use serde::Serialize;

use super::DeformError;
use crate::exactla::{sparse, Rational, SparseVec};
use crate::flatmodel::{Layout, SuperAlgebra};

/// Equations linear in the deformation (degree 2).
pub const LINEAR_EQUATIONS: [&str; 6] = ["vss", "sss", "alpha_delta", "beta_delta", "gamma_delta", "delta_cocycle"];
/// Equations involving `θ` or quadratic in `μ₂` (degrees 4 and 6).
pub const THETA_EQUATIONS: [&str; 5] = ["jacobi_022", "jacobi_112", "jacobi_122", "jacobi_222a", "jacobi_222b"];

/// Bracket `μ = μ₀ + μ₂ + μ₄` on a sub-basis, with `μ₀` the graded bracket of `𝔞`.
#[derive(Clone, Debug)]
pub struct GeneralPresentation {
    pub layout: Layout,
    pub graded: SuperAlgebra,
    pub degree_two: SuperAlgebra,
    pub degree_four: SuperAlgebra,
}

/// Failure count and first failing basis triple of one equation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquationResidual {
    pub name: &'static str,
    pub failures: usize,
    pub first: Option<(usize, usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquationReport {
    pub equations: Vec<EquationResidual>,
}

impl EquationReport {
    pub fn passed(&self) -> bool {
        self.equations.iter().all(|e| e.failures == 0)
    }

    pub fn failures(&self, name: &str) -> usize {
        self.equations.iter().find(|e| e.name == name).map_or(0, |e| e.failures)
    }
}

impl GeneralPresentation {
    /// Splits a bracket by how far each structure constant raises the degree.
    pub fn from_algebra(layout: Layout, algebra: &SuperAlgebra) -> Result<Self, DeformError> {
        let n = algebra.dim();
        if n != layout.dim() || algebra.degrees() != layout.degrees().as_slice() {
            return Err(DeformError::Shape("bracket does not match the sub-basis layout".into()));
        }
        let empty = || SuperAlgebra::new(algebra.degrees().to_vec(), algebra.parities().to_vec());
        let mut parts = [empty(), empty(), empty()];
        for i in 0..n {
            for j in i..n {
                let mut split: [SparseVec; 3] = Default::default();
                for (k, x) in algebra.bracket_basis(i, j) {
                    let shift = algebra.degree(*k) - algebra.degree(i) - algebra.degree(j);
                    let slot = match shift {
                        0 => 0,
                        2 => 1,
                        4 => 2,
                        _ => {
                            return Err(DeformError::Shape(format!(
                                "[{i},{j}] has a component of degree shift {shift}"
                            )))
                        }
                    };
                    split[slot].push((*k, x.clone()));
                }
                for (part, v) in parts.iter_mut().zip(split) {
                    if !v.is_empty() {
                        if i == j {
                            part.add_bracket(i, i, &v);
                        } else {
                            part.set_bracket(i, j, v);
                        }
                    }
                }
            }
        }
        let [graded, degree_two, degree_four] = parts;
        Ok(GeneralPresentation { layout, graded, degree_two, degree_four })
    }

    /// The total bracket `μ₀ + μ₂ + μ₄`.
    pub fn total(&self) -> SuperAlgebra {
        let mut alg = self.graded.clone();
        let n = alg.dim();
        for part in [&self.degree_two, &self.degree_four] {
            for i in 0..n {
                for j in i..n {
                    let v = part.bracket_basis(i, j);
                    if !v.is_empty() {
                        alg.add_bracket(i, j, v);
                    }
                }
            }
        }
        alg
    }

    fn part(&self, shift: usize) -> &SuperAlgebra {
        match shift {
            0 => &self.graded,
            2 => &self.degree_two,
            _ => &self.degree_four,
        }
    }

    /// Degree-`n` part of the Jacobiator on basis elements.
    fn jacobiator(&self, n: usize, i: usize, j: usize, k: usize) -> SparseVec {
        let ei = vec![(i, Rational::one())];
        let ej = vec![(j, Rational::one())];
        let ek = vec![(k, Rational::one())];
        let sign = Rational::from_int(-self.graded.koszul(i, j));
        let mut acc: SparseVec = Vec::new();
        for a in [0, 2, 4] {
            if a > n || n - a > 4 {
                continue;
            }
            let (inner, outer) = (self.part(a), self.part(n - a));
            let x = outer.bracket(&ei, inner.bracket_basis(j, k));
            let y = outer.bracket(inner.bracket_basis(i, j), &ek);
            let z = outer.bracket(&ej, inner.bracket_basis(i, k));
            acc = sparse::axpy(&acc, &Rational::one(), &x);
            acc = sparse::axpy(&acc, &-Rational::one(), &y);
            acc = sparse::axpy(&acc, &sign, &z);
        }
        acc
    }

    /// `(#𝔥, #V, #S′)` among the arguments.
    fn triple_type(&self, t: [usize; 3]) -> (usize, usize, usize) {
        let l = self.layout;
        let nv = t.iter().filter(|&&x| x < l.v).count();
        let ns = t.iter().filter(|&&x| x >= l.v && x < l.v + l.s).count();
        (3 - nv - ns, nv, ns)
    }

    fn evaluate(&self, degrees: &[usize], names: &[&'static str]) -> EquationReport {
        let n = self.graded.dim();
        let hits: Vec<(&'static str, (usize, usize, usize))> = (0..n)
            .into_par_iter()
            .flat_map_iter(|i| (i..n).flat_map(move |j| (j..n).map(move |k| (i, j, k))))
            .flat_map_iter(|(i, j, k)| {
                let ty = self.triple_type([i, j, k]);
                degrees
                    .iter()
                    .filter(move |&&d| !self.jacobiator(d, i, j, k).is_empty())
                    .map(move |&d| (equation_name(d, ty), (i, j, k)))
                    .collect::<Vec<_>>()
            })
            .collect();
        let mut equations: Vec<EquationResidual> = names
            .iter()
            .chain(std::iter::once(&"unclassified"))
            .map(|&name| EquationResidual { name, failures: 0, first: None })
            .collect();
        for (name, t) in hits {
            let slot = equations
                .iter_mut()
                .find(|e| e.name == name)
                .expect("every equation name is listed");
            slot.failures += 1;
            if slot.first.is_none_or(|f| t < f) {
                slot.first = Some(t);
            }
        }
        EquationReport { equations }
    }
}

fn equation_name(degree: usize, ty: (usize, usize, usize)) -> &'static str {
    match (degree, ty) {
        (2, (0, 1, 2)) => "vss",
        (2, (0, 0, 3)) => "sss",
        (2, (1, 2, 0)) => "alpha_delta",
        (2, (1, 1, 1)) => "beta_delta",
        (2, (1, 0, 2)) => "gamma_delta",
        (2, (2, 1, 0)) => "delta_cocycle",
        (4, (1, 2, 0)) => "jacobi_022",
        (4, (0, 1, 2)) => "jacobi_112",
        (4, (0, 2, 1)) => "jacobi_122",
        (4, (0, 3, 0)) => "jacobi_222a",
        (6, (0, 3, 0)) => "jacobi_222b",
        _ => "unclassified",
    }
}

/// The six linear cocycle equations for `α + β + γ + δ`.
pub fn check_full_cocycle(pres: &GeneralPresentation) -> EquationReport {
    pres.evaluate(&[2], &LINEAR_EQUATIONS)
}

/// The five identities involving `θ`.
pub fn check_theta_system(pres: &GeneralPresentation) -> EquationReport {
    pres.evaluate(&[4, 6, 8], &THETA_EQUATIONS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::Signature;
    use crate::deform::GradedSubalgebra;
    use crate::flatmodel::{FlatModel, Parity};
    use std::sync::Arc;

    fn flat(p: usize, q: usize, parity: Parity) -> GeneralPresentation {
        let m = Arc::new(FlatModel::minimal(Signature::auto(p, q).unwrap(), parity).unwrap());
        let sub = GradedSubalgebra::full(m);
        GeneralPresentation::from_algebra(sub.layout(), &sub.graded_algebra()).unwrap()
    }

    #[test]
    fn zero_deformation_passes_everything() {
        for parity in [Parity::Symmetric, Parity::Skew] {
            let p = flat(1, 3, parity);
            assert!(check_full_cocycle(&p).passed());
            assert!(check_theta_system(&p).passed());
            assert_eq!(p.total(), p.graded);
        }
    }

    #[test]
    fn perturbed_delta_breaks_the_delta_cocycle_condition() {
        let mut p = flat(1, 2, Parity::Symmetric);
        let l = p.layout;
        // δ(A_0, e_0) = A_0.
        p.degree_two.add_bracket(l.hi(0), l.vi(0), &[(l.hi(0), Rational::one())]);
        let r = check_full_cocycle(&p);
        assert!(r.failures("delta_cocycle") > 0);
    }

    #[test]
    fn flipped_theta_entry_breaks_222a() {
        let mut p = flat(1, 3, Parity::Symmetric);
        let l = p.layout;
        // θ(e_0, e_1) = A_k for the rotation in a plane not containing e_0 or e_1.
        p.degree_four.add_bracket(l.vi(0), l.vi(1), &[(l.hi(5), Rational::one())]);
        let r = check_theta_system(&p);
        assert!(r.failures("jacobi_222a") > 0);
        assert!(check_full_cocycle(&p).passed());
    }

    /// Explicit oracle for the cyclic identity `α(α(u,v),w) + θ(u,v)w` on `V`.
    fn explicit_222a(p: &GeneralPresentation, u: usize, v: usize, w: usize) -> SparseVec {
        let l = p.layout;
        let alpha = |x: &[(usize, Rational)], y: &[(usize, Rational)]| -> SparseVec {
            p.degree_two.bracket(x, y).into_iter().filter(|(k, _)| *k < l.v).collect()
        };
        let theta = |x: &[(usize, Rational)], y: &[(usize, Rational)]| -> SparseVec {
            p.degree_four.bracket(x, y).into_iter().filter(|(k, _)| *k >= l.v + l.s).collect()
        };
        let act = |h: &SparseVec, z: &[(usize, Rational)]| -> SparseVec { p.graded.bracket(h, z) };
        let e = |i: usize| vec![(i, Rational::one())];
        let mut acc: SparseVec = Vec::new();
        for (x, y, z) in [(u, v, w), (v, w, u), (w, u, v)] {
            acc = sparse::axpy(&acc, &Rational::one(), &alpha(&alpha(&e(x), &e(y)), &e(z)));
            acc = sparse::axpy(&acc, &Rational::one(), &act(&theta(&e(x), &e(y)), &e(z)));
        }
        acc
    }

    #[test]
    fn generic_split_agrees_with_explicit_222a() {
        let mut p = flat(1, 3, Parity::Symmetric);
        let l = p.layout;
        p.degree_four.add_bracket(l.vi(0), l.vi(1), &[(l.hi(5), Rational::one())]);
        p.degree_two.add_bracket(l.vi(1), l.vi(2), &[(l.vi(3), Rational::from_int(2))]);
        for u in 0..l.v {
            for v in u + 1..l.v {
                for w in v + 1..l.v {
                    let generic = p.jacobiator(4, u, v, w);
                    let oracle = explicit_222a(&p, u, v, w);
                    assert_eq!(generic.is_empty(), oracle.is_empty(), "({u},{v},{w})");
                }
            }
        }
    }
}
