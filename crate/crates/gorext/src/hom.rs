//! `Hom_A(P, A)` for a semi-free `P`, with `D(f) = d∘f − (−1)^k f∘δ`.
//!
//! A module map is determined by its values on the semibasis, so a basis of
//! `Hom^k` is the set of pairs (semibasis element `m`, basis monomial of `A`
//! in internal degree `|m| + k`), ordered by `m` first.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::algebra::{Poly, Presentation};
use crate::field::FieldSpec;
use crate::linalg::{SparseMatrix, SparseVec};
use crate::parallel::par_range;
use crate::resolution::SemiFreeModule;

/// A module map of internal degree `degree`, given on the semibasis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomElement {
    pub degree: i32,
    pub values: Vec<Poly>,
}

impl HomElement {
    pub fn zero(degree: i32, len: usize) -> Self {
        HomElement { degree, values: vec![Poly::zero(); len] }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Poly::is_zero)
    }

    /// Value on the unit of the semibasis.
    pub fn at_one(&self) -> &Poly {
        &self.values[0]
    }
}

/// Offsets of each semibasis block in one degree of `Hom`.
#[derive(Debug)]
struct HomBasis {
    offsets: Vec<usize>,
    len: usize,
}

#[derive(Debug)]
pub struct HomComplex {
    pub module: Arc<SemiFreeModule>,
    /// `incoming[i] = [(j, c_ji)]`: the terms `c_ji·m_i` of `δ(m_j)`.
    incoming: Vec<Vec<(usize, Poly)>>,
    cache: RwLock<HashMap<i32, Arc<HomBasis>>>,
}

impl HomComplex {
    pub fn new(module: Arc<SemiFreeModule>) -> Self {
        let mut incoming: Vec<Vec<(usize, Poly)>> = vec![Vec::new(); module.gens.len()];
        for (j, terms) in module.delta.iter().enumerate() {
            for (i, c) in terms {
                incoming[*i].push((j, c.clone()));
            }
        }
        HomComplex { module, incoming, cache: RwLock::new(HashMap::new()) }
    }

    pub fn base(&self) -> &Presentation {
        &self.module.base
    }

    pub fn field(&self) -> FieldSpec {
        self.module.field()
    }

    pub fn semibasis_len(&self) -> usize {
        self.module.gens.len()
    }

    fn layout(&self, k: i32) -> Arc<HomBasis> {
        if let Some(b) = self.cache.read().unwrap().get(&k) {
            return b.clone();
        }
        let mut offsets = Vec::with_capacity(self.module.gens.len());
        let mut len = 0;
        for g in &self.module.gens {
            offsets.push(len);
            len += self.base().dim(g.degree + k);
        }
        let b = Arc::new(HomBasis { offsets, len });
        self.cache.write().unwrap().entry(k).or_insert(b).clone()
    }

    pub fn dim(&self, k: i32) -> usize {
        self.layout(k).len
    }

    /// Coordinates of a homogeneous element.
    pub fn coords(&self, f: &HomElement) -> SparseVec {
        let lay = self.layout(f.degree);
        let mut entries = Vec::new();
        for (i, p) in f.values.iter().enumerate() {
            let n = self.module.gens[i].degree + f.degree;
            for (pos, c) in self.base().coords(p, n).into_entries() {
                entries.push((lay.offsets[i] + pos, c));
            }
        }
        SparseVec::from_entries(entries)
    }

    pub fn element(&self, k: i32, v: &SparseVec) -> HomElement {
        let lay = self.layout(k);
        let mut out = HomElement::zero(k, self.semibasis_len());
        for (pos, c) in v.iter() {
            // Last block whose offset is ≤ pos.
            let i = lay.offsets.partition_point(|&o| o <= *pos) - 1;
            let n = self.module.gens[i].degree + k;
            let m = self.base().basis(n).monos[pos - lay.offsets[i]].clone();
            out.values[i].add_term(m, c.clone());
        }
        out
    }

    /// `D(f)(m_j) = d(f(m_j)) − (−1)^k Σ_i (−1)^{k|c_ji|} c_ji·f(m_i)`.
    pub fn apply_d(&self, f: &HomElement) -> HomElement {
        let a = self.base();
        let k = f.degree;
        let mut out = HomElement::zero(k + 1, self.semibasis_len());
        for (j, v) in f.values.iter().enumerate() {
            if !v.is_zero() {
                out.values[j] = a.d(v);
            }
        }
        for (i, fi) in f.values.iter().enumerate() {
            if fi.is_zero() {
                continue;
            }
            for (j, c) in &self.incoming[i] {
                let term = self.signed_action(k, c, fi);
                out.values[*j] = out.values[*j].sub(&term);
            }
        }
        out
    }

    /// `(−1)^k (−1)^{k|c|} c·x`, by homogeneous parts of `c`.
    fn signed_action(&self, k: i32, c: &Poly, x: &Poly) -> Poly {
        let a = self.base();
        let mut out = Poly::zero();
        let k_odd = k.rem_euclid(2) == 1;
        for (m, cm) in c.terms() {
            let neg = k_odd ^ (k_odd && a.mono_odd(m));
            let t = Poly::monomial(m.clone(), cm.clone().signed(neg));
            out = out.add(&a.mul(&t, x));
        }
        out
    }

    /// Matrix of `D: Hom^k → Hom^{k+1}`.
    pub fn differential(&self, k: i32) -> SparseMatrix {
        let src = self.layout(k);
        let cols = par_range(src.len, |pos| {
            let f = self.element(k, &SparseVec::unit(pos, self.field()));
            self.coords(&self.apply_d(&f))
        });
        SparseMatrix::from_columns(self.field(), self.dim(k + 1), cols)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_model;
    use crate::resolution::ah_acyclic_closure;

    fn hom(src: &str) -> HomComplex {
        let pres = Arc::new(parse_model(src).unwrap());
        let c = ah_acyclic_closure(pres).unwrap();
        HomComplex::new(Arc::new(c.module))
    }

    #[test]
    fn point_hom_is_the_field() {
        let h = hom("flavor adams-hilton\n");
        assert_eq!(h.dim(0), 1);
        assert_eq!(h.dim(1), 0);
        assert_eq!(h.dim(-1), 0);
        assert!(h.differential(0).is_zero());
    }

    #[test]
    fn sphere_d_of_f() {
        // T(a), |a| = 2: D(f)(1⊗sa) = −(−1)^{p(|a|+1)} a·f(1).
        let h = hom("flavor adams-hilton\ngen a 2\n");
        let q = FieldSpec::Rationals;
        for p in [-4, -2, 0] {
            // f(1) = a^{-p/2}, f(sa) = 0.
            let a = h.base();
            let mut f = HomElement::zero(p, 2);
            let mut w = a.one();
            for _ in 0..(-p / 2) {
                w = a.mul(&w, &a.gen_poly(0));
            }
            f.values[0] = w.clone();
            let df = h.apply_d(&f);
            let sign = (p * 3).rem_euclid(2) == 1;
            let expected = a.mul(&a.gen_poly(0), &w).scaled(&q.one().signed(!sign));
            assert_eq!(df.values[1], expected);
            assert!(df.values[0].is_zero());
        }
    }

    #[test]
    fn d_squared_vanishes() {
        let h = hom("field F3\nflavor adams-hilton\ngen a 1\ngen a' 2\nd a' = -3*a\n");
        for k in -5..4 {
            let d0 = h.differential(k);
            let d1 = h.differential(k + 1);
            assert!(d1.compose(&d0).unwrap().is_zero(), "D² ≠ 0 at {k}");
        }
        let h = hom("field Q\nflavor adams-hilton\ngen a 1\ngen a' 2\nd a' = -a\n");
        for k in -5..4 {
            assert!(h.differential(k + 1).compose(&h.differential(k)).unwrap().is_zero());
        }
    }

    #[test]
    fn coords_round_trip() {
        let h = hom("flavor adams-hilton\ngen a 1\ngen b 2\n");
        for k in -4..=2 {
            for pos in 0..h.dim(k) {
                let v = SparseVec::unit(pos, FieldSpec::Rationals);
                assert_eq!(h.coords(&h.element(k, &v)), v);
            }
        }
    }
}
