//! Topological-complexity bounds from kernels of n-fold multiplication.
//!
//! Everything runs over a [`FoldedAlgebra`]: a graded algebra `T` with a
//! differential and a degreewise fold map `μ: T → B`. Two backends exist: the
//! chain-level tensor power `(ΛV)^{⊗n}`, and the tensor power of a finite
//! table algebra (a cohomology algebra, or a unitalized Ext algebra).
//!
//! Ideal powers use that `ker μ` is an ideal:
//! `(ker)^m_D = span{ k·x : k ∈ ker_d, x ∈ (ker)^{m−1}_{D−d} }`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use smallvec::SmallVec;

use crate::algebra::{Flavor, Generator, Mono, Poly, Presentation};
use crate::ext::{base_cohomology, ExtAlgebra, ExtError, Gorenstein, ProductEntry, UnitStatus, Window};
use crate::field::FieldSpec;
use crate::linalg::{kernel, row_reduce, Homology, LinalgError, Reducer, SparseMatrix, SparseVec};
use crate::parallel::par_map;

/// A graded algebra with differential and a fold map, each finite per degree.
pub trait FoldedAlgebra: Sync {
    fn field(&self) -> FieldSpec;
    /// Degrees that may be nonzero, ascending.
    fn degrees(&self) -> Vec<i32>;
    fn dim(&self, n: i32) -> usize;
    fn mul(&self, a: i32, x: &SparseVec, b: i32, y: &SparseVec) -> SparseVec;
    /// `d: T^n → T^{n+1}`.
    fn differential(&self, n: i32) -> SparseMatrix;
    /// `μ: T^n → B^n`.
    fn fold(&self, n: i32) -> SparseMatrix;
}

/// `(ΛV)^{⊗n}` as `Λ(V ⊕ … ⊕ V)`, generators copy-major and named `x[i]`.
#[derive(Debug)]
pub struct TensorPowerAlgebra {
    pub base: Arc<Presentation>,
    pub n: usize,
    pub total: Presentation,
    /// Degrees considered, `0..=top`.
    pub top: i32,
}

impl TensorPowerAlgebra {
    pub fn new(base: Arc<Presentation>, n: usize, top: i32) -> Result<Self, ExtError> {
        if base.flavor() != Flavor::Commutative {
            return Err(ExtError::TensorProducts);
        }
        let k = base.ngens();
        let mut gens = Vec::with_capacity(n * k);
        let mut diff = Vec::with_capacity(n * k);
        for c in 0..n {
            for (j, g) in base.generators().iter().enumerate() {
                gens.push(Generator::new(format!("{}[{}]", g.name, c + 1), g.degree));
                diff.push(Self::shift(&base.differential().images[j], c, n, k));
            }
        }
        let total = Presentation::new(base.field(), Flavor::Commutative, gens, diff)
            .expect("tensor power of a valid presentation is valid");
        Ok(TensorPowerAlgebra { base, n, total, top })
    }

    fn shift(p: &Poly, copy: usize, n: usize, k: usize) -> Poly {
        p.terms()
            .map(|(m, c)| {
                let mut e: Mono = SmallVec::from_elem(0, n * k);
                e[copy * k..(copy + 1) * k].copy_from_slice(m);
                (e, c.clone())
            })
            .collect()
    }

    /// A base element placed in tensor factor `copy`.
    pub fn embed(&self, p: &Poly, copy: usize) -> Poly {
        Self::shift(p, copy, self.n, self.base.ngens())
    }

    /// `ω ⊗ … ⊗ ω`.
    pub fn tensor_power_of(&self, omega: &Poly) -> Poly {
        let mut acc = self.total.one();
        for c in 0..self.n {
            acc = self.total.mul(&acc, &self.embed(omega, c));
        }
        acc
    }

    /// `μ_n` on one monomial: the product of its factors in canonical order.
    pub fn mu_mono(&self, m: &Mono) -> Poly {
        let k = self.base.ngens();
        let mut acc = self.base.one();
        for (i, &e) in m.iter().enumerate() {
            for _ in 0..e {
                acc = self.base.mul(&acc, &self.base.gen_poly(i % k));
            }
        }
        acc
    }

    pub fn mu(&self, p: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in p.terms() {
            out = out.add(&self.mu_mono(m).scaled(c));
        }
        out
    }
}

impl FoldedAlgebra for TensorPowerAlgebra {
    fn field(&self) -> FieldSpec {
        self.base.field()
    }

    fn degrees(&self) -> Vec<i32> {
        (0..=self.top).collect()
    }

    fn dim(&self, n: i32) -> usize {
        if n < 0 || n > self.top {
            return 0;
        }
        self.total.dim(n)
    }

    fn mul(&self, a: i32, x: &SparseVec, b: i32, y: &SparseVec) -> SparseVec {
        let t = &self.total;
        let p = t.mul(&t.from_coords(a, x), &t.from_coords(b, y));
        t.coords(&p, a + b)
    }

    fn differential(&self, n: i32) -> SparseMatrix {
        let t = &self.total;
        let src = t.basis(n);
        let cols = par_map(&src.monos, |m| t.coords(&t.d_mono(m), n + 1));
        SparseMatrix::from_columns(self.field(), t.dim(n + 1), cols)
    }

    fn fold(&self, n: i32) -> SparseMatrix {
        let src = self.total.basis(n);
        let cols = par_map(&src.monos, |m| self.base.coords(&self.mu_mono(m), n));
        SparseMatrix::from_columns(self.field(), self.base.dim(n), cols)
    }
}

/// A finite graded algebra given by structure constants, with a unit.
#[derive(Clone, Debug)]
pub struct TableAlgebra {
    pub field: FieldSpec,
    /// Basis size per degree (nonzero degrees only).
    pub dims: BTreeMap<i32, usize>,
    /// `(a, i, b, j) → e_{a,i}·e_{b,j}`; missing entries are zero.
    pub products: HashMap<(i32, usize, i32, usize), SparseVec>,
    /// `(0, index)` of the unit.
    pub unit: usize,
    /// False when some product left the computed range and was set to zero.
    pub complete: bool,
}

impl TableAlgebra {
    pub fn dim(&self, n: i32) -> usize {
        self.dims.get(&n).copied().unwrap_or(0)
    }

    pub fn mul_basis(&self, a: i32, i: usize, b: i32, j: usize) -> SparseVec {
        self.products.get(&(a, i, b, j)).cloned().unwrap_or_default()
    }

    pub fn mul(&self, a: i32, x: &SparseVec, b: i32, y: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (i, c) in x.iter() {
            for (j, e) in y.iter() {
                out.axpy(&(c * e), &self.mul_basis(a, *i, b, *j));
            }
        }
        out
    }

    /// The cohomology algebra of a commutative presentation in degrees
    /// `0..=hi`; products landing above `hi` are dropped.
    pub fn cohomology(pres: &Presentation, hi: i32) -> Result<Self, LinalgError> {
        let field = pres.field();
        let degs: Vec<i32> = (0..=hi).collect();
        let hs = par_map(&degs, |&k| base_cohomology(pres, k));
        let mut homs = BTreeMap::new();
        for (k, h) in degs.into_iter().zip(hs) {
            let h = h?;
            if h.dim > 0 {
                homs.insert(k, h);
            }
        }
        let mut products = HashMap::new();
        let mut complete = true;
        for (&a, ha) in &homs {
            for (&b, hb) in &homs {
                for (i, x) in ha.reps.iter().enumerate() {
                    for (j, y) in hb.reps.iter().enumerate() {
                        if a + b > hi {
                            complete = false;
                            continue;
                        }
                        let p = pres.mul(&pres.from_coords(a, x), &pres.from_coords(b, y));
                        let v = match homs.get(&(a + b)) {
                            Some(h) => h.coordinates(&pres.coords(&p, a + b)).expect("product of cocycles"),
                            None => SparseVec::new(),
                        };
                        if !v.is_zero() {
                            products.insert((a, i, b, j), v);
                        }
                    }
                }
            }
        }
        let dims = homs.iter().map(|(k, h)| (*k, h.dim)).collect();
        let mut t = TableAlgebra { field, dims, products, unit: 0, complete };
        // The degree-0 class is represented by c·1.
        let c = pres.from_coords(0, &homs[&0].reps[0]).coefficient(&pres.one_mono()).cloned();
        t.rescale_to_unit(0, c.unwrap_or(field.one()));
        Ok(t)
    }

    /// Replaces basis vector `e_i` of degree 0, known to equal `c·1`, by `1`.
    fn rescale_to_unit(&mut self, i: usize, c: crate::field::Scalar) {
        self.unit = i;
        if c.is_one() {
            return;
        }
        let ci = c.inv();
        let mut next = HashMap::new();
        for (&(a, ia, b, ib), v) in &self.products {
            let mut v = v.clone();
            if a == 0 && ia == i {
                v.scale(&ci);
            }
            if b == 0 && ib == i {
                v.scale(&ci);
            }
            if a + b == 0 {
                if let Some(x) = v.get(i).cloned() {
                    let mut w: Vec<(usize, _)> = v.iter().filter(|e| e.0 != i).cloned().collect();
                    w.push((i, &x * &c));
                    v = SparseVec::from_entries(w);
                }
            }
            next.insert((a, ia, b, ib), v);
        }
        self.products = next;
    }

    /// The Ext algebra with a unit: its own if `ε̃` is a class satisfying the
    /// unit law, otherwise one adjoined in degree 0.
    pub fn unitalized_ext(ext: &ExtAlgebra) -> Result<Self, ExtError> {
        let table = ext.products.as_ref().ok_or(ExtError::TensorProducts)?;
        let field = ext.field();
        let mut dims: BTreeMap<i32, usize> =
            ext.groups.values().filter(|g| g.dim > 0).map(|g| (g.degree, g.dim)).collect();
        // TODO: general change of basis when the unit class is a sum of
        // several representatives; such a class is adjoined anew for now.
        let own_unit = match &table.unit {
            UnitStatus::Class(u) if table.unit_law.passed() && u.nnz() == 1 => u.iter().next().cloned(),
            _ => None,
        };
        let shift = usize::from(own_unit.is_none());
        if shift == 1 {
            *dims.entry(0).or_insert(0) += 1;
        }
        let idx = |d: i32, i: usize| if d == 0 { i + shift } else { i };
        let remap = |d: i32, v: &SparseVec| if d == 0 { v.remap(|i| Some(i + shift)) } else { v.clone() };
        let mut products = HashMap::new();
        let mut complete = true;
        for (&(a, i, b, j), e) in &table.entries {
            match e {
                ProductEntry::Coords(v) if !v.is_zero() => {
                    products.insert((a, idx(a, i), b, idx(b, j)), remap(a + b, v));
                }
                ProductEntry::Coords(_) => {}
                ProductEntry::OutOfWindow => complete = false,
            }
        }
        if shift == 1 {
            for (&d, &n) in &dims {
                let lo = if d == 0 { 1 } else { 0 };
                for i in lo..n {
                    let e = SparseVec::unit(i, field);
                    products.insert((0, 0, d, i), e.clone());
                    products.insert((d, i, 0, 0), e);
                }
            }
            products.insert((0, 0, 0, 0), SparseVec::unit(0, field));
        }
        let mut t = TableAlgebra { field, dims, products, unit: 0, complete };
        if let Some((i, c)) = own_unit {
            // u = c·e_i, so e_i = c⁻¹·1.
            t.rescale_to_unit(i, c.inv());
        }
        Ok(t)
    }
}

/// `H^{⊗n}` for a table algebra `H`, folded by multiplication.
#[derive(Debug)]
pub struct TablePower {
    pub factor: TableAlgebra,
    pub n: usize,
    /// Basis tuples `[(deg, index)]` per total degree.
    basis: BTreeMap<i32, Vec<Vec<(i32, usize)>>>,
    index: HashMap<Vec<(i32, usize)>, usize>,
}

impl TablePower {
    pub fn new(factor: TableAlgebra, n: usize) -> Self {
        let singles: Vec<(i32, usize)> =
            factor.dims.iter().flat_map(|(&d, &k)| (0..k).map(move |i| (d, i))).collect();
        let mut tuples: Vec<Vec<(i32, usize)>> = vec![Vec::new()];
        for _ in 0..n {
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    singles.iter().map(move |s| {
                        let mut t = t.clone();
                        t.push(*s);
                        t
                    })
                })
                .collect();
        }
        let mut basis: BTreeMap<i32, Vec<Vec<(i32, usize)>>> = BTreeMap::new();
        for t in tuples {
            basis.entry(t.iter().map(|s| s.0).sum()).or_default().push(t);
        }
        let mut index = HashMap::new();
        for ts in basis.values() {
            for (i, t) in ts.iter().enumerate() {
                index.insert(t.clone(), i);
            }
        }
        TablePower { factor, n, basis, index }
    }

    /// The basis tuple `(u, …, u)` of a factor basis element `u`.
    pub fn diagonal(&self, d: i32, i: usize) -> (i32, SparseVec) {
        let t = vec![(d, i); self.n];
        (d * self.n as i32, SparseVec::unit(self.index[&t], self.factor.field))
    }

    fn mul_tuples(&self, s: &[(i32, usize)], t: &[(i32, usize)]) -> SparseVec {
        let f = &self.factor;
        // (a_1⊗…⊗a_n)(b_1⊗…⊗b_n) = (−1)^{Σ_{i<j} |a_j||b_i|} ⊗ a_i b_i.
        let mut neg = false;
        for i in 0..self.n {
            for j in i + 1..self.n {
                if (s[j].0 * t[i].0).rem_euclid(2) == 1 {
                    neg = !neg;
                }
            }
        }
        let mut acc: Vec<(Vec<(i32, usize)>, crate::field::Scalar)> = vec![(Vec::new(), f.field.one().signed(neg))];
        for i in 0..self.n {
            let p = f.mul_basis(s[i].0, s[i].1, t[i].0, t[i].1);
            if p.is_zero() {
                return SparseVec::new();
            }
            let d = s[i].0 + t[i].0;
            let mut next = Vec::new();
            for (tup, c) in &acc {
                for (k, e) in p.iter() {
                    let mut tup = tup.clone();
                    tup.push((d, *k));
                    next.push((tup, c * e));
                }
            }
            acc = next;
        }
        SparseVec::from_entries(acc.into_iter().map(|(t, c)| (self.index[&t], c)).collect())
    }
}

impl FoldedAlgebra for TablePower {
    fn field(&self) -> FieldSpec {
        self.factor.field
    }

    fn degrees(&self) -> Vec<i32> {
        self.basis.keys().copied().collect()
    }

    fn dim(&self, n: i32) -> usize {
        self.basis.get(&n).map_or(0, Vec::len)
    }

    fn mul(&self, a: i32, x: &SparseVec, b: i32, y: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        let (Some(sa), Some(sb)) = (self.basis.get(&a), self.basis.get(&b)) else {
            return out;
        };
        for (i, c) in x.iter() {
            for (j, e) in y.iter() {
                out.axpy(&(c * e), &self.mul_tuples(&sa[*i], &sb[*j]));
            }
        }
        out
    }

    fn differential(&self, n: i32) -> SparseMatrix {
        SparseMatrix::zero(self.field(), self.dim(n + 1), self.dim(n))
    }

    fn fold(&self, n: i32) -> SparseMatrix {
        let f = &self.factor;
        let cols = self
            .basis
            .get(&n)
            .map(|ts| {
                ts.iter()
                    .map(|t| {
                        let mut deg = t[0].0;
                        let mut v = SparseVec::unit(t[0].1, f.field);
                        for s in &t[1..] {
                            v = f.mul(deg, &v, s.0, &SparseVec::unit(s.1, f.field));
                            deg += s.0;
                        }
                        v
                    })
                    .collect()
            })
            .unwrap_or_default();
        SparseMatrix::from_columns(self.field(), f.dim(n), cols)
    }
}

/// Reduced bases of `(ker μ)^m` per degree, for `m = 1, 2, …`.
pub struct IdealPowers<'a, A: FoldedAlgebra> {
    alg: &'a A,
    /// `powers[m−1][deg]`.
    powers: Vec<BTreeMap<i32, Vec<SparseVec>>>,
}

/// Kernel of `μ` in degree `n`; asserts `μ(k) = 0` on every vector returned.
pub fn mu_n_kernel<A: FoldedAlgebra>(alg: &A, n: i32) -> Vec<SparseVec> {
    let f = alg.fold(n);
    let ker = kernel(&f);
    for k in &ker {
        assert!(f.apply(k).is_zero(), "kernel vector not killed by μ");
    }
    ker
}

impl<'a, A: FoldedAlgebra> IdealPowers<'a, A> {
    pub fn new(alg: &'a A) -> Self {
        let degs = alg.degrees();
        let kers = par_map(&degs, |&n| mu_n_kernel(alg, n));
        let first: BTreeMap<i32, Vec<SparseVec>> =
            degs.into_iter().zip(kers).filter(|(_, k)| !k.is_empty()).collect();
        IdealPowers { alg, powers: vec![first] }
    }

    /// `(ker)^m` per degree; `m ≥ 1`.
    pub fn power(&mut self, m: usize) -> &BTreeMap<i32, Vec<SparseVec>> {
        assert!(m >= 1);
        while self.powers.len() < m {
            let prev = self.powers.last().unwrap();
            let ker = &self.powers[0];
            let degs = self.alg.degrees();
            let alg = self.alg;
            let next: Vec<Vec<SparseVec>> = par_map(&degs, |&big| {
                let mut spanning = Vec::new();
                for (&d, ks) in ker {
                    let Some(xs) = prev.get(&(big - d)) else { continue };
                    for k in ks {
                        for x in xs {
                            let p = alg.mul(d, k, big - d, x);
                            if !p.is_zero() {
                                spanning.push(p);
                            }
                        }
                    }
                }
                if spanning.is_empty() {
                    return spanning;
                }
                let m = SparseMatrix::from_columns(alg.field(), alg.dim(big), spanning);
                row_reduce(&m).image
            });
            let map = degs.into_iter().zip(next).filter(|(_, v)| !v.is_empty()).collect();
            self.powers.push(map);
        }
        &self.powers[m - 1]
    }

    pub fn is_zero(&mut self, m: usize) -> bool {
        self.power(m).is_empty()
    }

    /// Membership of `x` (degree `n`) in `(ker)^m + extra`; `m = 0` is the
    /// whole algebra.
    pub fn contains(&mut self, m: usize, n: i32, x: &SparseVec, extra: &[SparseVec]) -> bool {
        if m == 0 {
            return true;
        }
        let field = self.alg.field();
        let mut r = Reducer::new(field, false);
        for v in self.power(m).get(&n).into_iter().flatten().chain(extra) {
            r.insert(v.clone(), None);
        }
        r.contains(x)
    }
}

/// A value with an exactness flag; `value = None` means "> m_max".
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Certified {
    pub value: Option<u32>,
    pub exact: bool,
}

/// Largest `m` with `(ker μ)^m ≠ 0`, capped at `m_max`.
pub fn nilpotency<A: FoldedAlgebra>(alg: &A, m_max: u32) -> Option<u32> {
    let mut powers = IdealPowers::new(alg);
    for m in 1..=(m_max as usize + 1) {
        if powers.is_zero(m) {
            return Some(m as u32 - 1);
        }
    }
    None
}

/// Least `m ≤ m_max` such that `H(T) → H(T/(ker)^{m+1})` is injective in
/// every degree of `degrees`.
pub fn least_injective<A: FoldedAlgebra>(alg: &A, degrees: &[i32], m_max: u32) -> Result<Option<u32>, LinalgError> {
    let field = alg.field();
    let data = par_map(degrees, |&n| -> Result<(i32, Vec<SparseVec>, Vec<SparseVec>), LinalgError> {
        let d_in = alg.differential(n - 1);
        let h = Homology::compute(field, &d_in, &alg.differential(n))?;
        Ok((n, h.reps, d_in.columns().to_vec()))
    });
    let data = data.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut powers = IdealPowers::new(alg);
    for m in 0..=m_max {
        let ideal = powers.power(m as usize + 1).clone();
        // Injective iff rank([I|B|reps]) = rank([I|B]) + #reps.
        let injective = data.iter().all(|(n, reps, bnd)| {
            let mut r = Reducer::new(field, false);
            for v in ideal.get(n).into_iter().flatten().chain(bnd) {
                r.insert(v.clone(), None);
            }
            // `insert` returns None exactly when a new pivot appears.
            reps.iter().all(|z| r.insert(z.clone(), None).is_none())
        });
        if injective {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// Top degree with nonzero cohomology in the computed range.
fn cohomology_top(h: &TableAlgebra) -> i32 {
    h.dims.keys().copied().max().unwrap_or(0)
}

pub fn zcl(pres: &Presentation, n: usize, window: Window, m_max: u32) -> Result<Certified, ExtError> {
    let hi = window.hi.max(0);
    let h = TableAlgebra::cohomology(pres, hi)?;
    let b = cohomology_top(&h);
    let exact = hi >= n as i32 * b && h.complete;
    let power = TablePower::new(h, n);
    Ok(Certified { value: nilpotency(&power, m_max), exact })
}

pub fn htc_lower(pres: Arc<Presentation>, n: usize, m_max: u32, window: Window) -> Result<Certified, ExtError> {
    let hi = window.hi.max(0);
    let h = TableAlgebra::cohomology(&pres, hi)?;
    let b = cohomology_top(&h);
    let exact = hi >= n as i32 * b;
    let top = if exact { n as i32 * b } else { hi };
    let t = TensorPowerAlgebra::new(pres, n, top + 1)?;
    let degrees: Vec<i32> = (0..=top).collect();
    Ok(Certified { value: least_injective(&t, &degrees, m_max)?, exact })
}

pub fn ext_zcl(ext: &ExtAlgebra, n: usize, m_max: u32) -> Result<Certified, ExtError> {
    let t = TableAlgebra::unitalized_ext(ext)?;
    let exact = t.complete;
    Ok(Certified { value: nilpotency(&TablePower::new(t, n), m_max), exact })
}

/// `htc_ext` on the class level, with the Gorenstein cross-check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HtcExt {
    pub value: Certified,
    /// Largest `m` with `Ω^{⊗n} ∈ (ker)^m` when the algebra is one class plus unit.
    pub omega_order: Option<u32>,
}

pub fn htc_ext(ext: &ExtAlgebra, n: usize, m_max: u32) -> Result<HtcExt, ExtError> {
    let t = TableAlgebra::unitalized_ext(ext)?;
    let exact = t.complete;
    let power = TablePower::new(t.clone(), n);
    let degrees = power.degrees();
    let value = least_injective(&power, &degrees, m_max)?;
    let mut omega_order = None;
    if ext.gorenstein_test() == Gorenstein::Yes {
        let (d, i) = ext
            .groups
            .values()
            .find(|g| g.dim == 1)
            .map(|g| (g.degree, 0))
            .expect("Gorenstein has a class");
        let i = if d == 0 && t.dim(0) == 2 { i + 1 } else { i };
        let (big, omega) = power.diagonal(d, i);
        let mut powers = IdealPowers::new(&power);
        let mut order = 0;
        while order <= m_max && powers.contains(order as usize + 1, big, &omega, &[]) {
            order += 1;
        }
        omega_order = Some(order);
    }
    Ok(HtcExt { value: Certified { value, exact }, omega_order })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Equal,
    NotEqual,
    Inconclusive(String),
}

impl Verdict {
    pub fn keyword(&self) -> &'static str {
        match self {
            Verdict::Equal => "equal",
            Verdict::NotEqual => "not_equal",
            Verdict::Inconclusive(_) => "inconclusive",
        }
    }
}

/// Membership of `ω^{⊗n}` in `(ker)^j`, literally and modulo coboundaries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membership {
    pub power: u32,
    pub chain: bool,
    pub class: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriterionResult {
    pub verdict: Verdict,
    pub m: u32,
    pub witness: Vec<Membership>,
}

/// Tests `ω^{⊗n} ∈ (ker μ_n)^m \ (ker μ_n)^{m+1}` for `ω = f(1)` of the
/// generating class; the verdict uses membership modulo coboundaries.
pub fn thm_criterion(ext: &ExtAlgebra, n: usize, m: u32) -> Result<CriterionResult, ExtError> {
    let inconclusive = |why: &str| CriterionResult { verdict: Verdict::Inconclusive(why.to_string()), m, witness: vec![] };
    if ext.flavor() != Flavor::Commutative || ext.field() != FieldSpec::Rationals {
        return Ok(inconclusive("needs a commutative model over Q"));
    }
    if ext.gorenstein_test() != Gorenstein::Yes {
        return Ok(inconclusive("not Gorenstein"));
    }
    if !ext.ev_nonzero() {
        return Ok(inconclusive("ev = 0"));
    }
    let g = ext.groups.values().find(|g| g.dim == 1).expect("Gorenstein has a class");
    let omega = g.reps[0].at_one().clone();
    let big = g.degree * n as i32;
    let t = TensorPowerAlgebra::new(ext.pres.clone(), n, big + 1)?;
    let w = t.tensor_power_of(&omega);
    let x = t.total.coords(&w, big);
    let boundaries = t.differential(big - 1).columns().to_vec();
    let mut powers = IdealPowers::new(&t);
    let mut witness = Vec::new();
    for j in [m, m + 1] {
        witness.push(Membership {
            power: j,
            chain: powers.contains(j as usize, big, &x, &[]),
            class: powers.contains(j as usize, big, &x, &boundaries),
        });
    }
    let verdict = if witness[0].class && !witness[1].class { Verdict::Equal } else { Verdict::NotEqual };
    Ok(CriterionResult { verdict, m, witness })
}

/// `a ≤ b` where `None` means "> m_max"; unknown when `a` exceeds the cap.
fn le(a: Option<u32>, b: Option<u32>) -> Option<bool> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a <= b),
        (Some(_), None) => Some(true),
        (None, _) => None,
    }
}

/// The inequality chain on window-certified values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainCheck {
    pub zcl_le_htc: Option<bool>,
    pub ext_zcl_le_htc_ext: Option<bool>,
    /// Only asserted when the criterion's hypotheses hold.
    pub htc_ext_le_htc_lower: Option<bool>,
}

impl ChainCheck {
    /// False when some decided inequality fails.
    pub fn holds(&self) -> bool {
        [self.zcl_le_htc, self.ext_zcl_le_htc_ext, self.htc_ext_le_htc_lower].iter().all(|c| *c != Some(false))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantSummary {
    pub n: usize,
    pub m_max: u32,
    pub zcl: Certified,
    pub htc_lower: Certified,
    pub ext_zcl: Certified,
    pub htc_ext: HtcExt,
    pub criterion: CriterionResult,
    pub chain: ChainCheck,
}

/// All invariants of a commutative model; `ext` must carry products.
pub fn invariants(
    pres: Arc<Presentation>,
    ext: &ExtAlgebra,
    n: usize,
    m_max: u32,
    window: Window,
) -> Result<InvariantSummary, ExtError> {
    let zcl = zcl(&pres, n, window, m_max)?;
    let htc_lower = htc_lower(pres, n, m_max, window)?;
    let ext_zcl = ext_zcl(ext, n, m_max)?;
    let htc_ext = htc_ext(ext, n, m_max)?;
    let criterion = match htc_ext.value.value {
        Some(m) => thm_criterion(ext, n, m)?,
        None => CriterionResult {
            verdict: Verdict::Inconclusive(format!("htc_ext exceeds m_max = {m_max}")),
            m: m_max,
            witness: vec![],
        },
    };
    let hypotheses = !matches!(criterion.verdict, Verdict::Inconclusive(_));
    let chain = ChainCheck {
        zcl_le_htc: le(zcl.value, htc_lower.value),
        ext_zcl_le_htc_ext: le(ext_zcl.value, htc_ext.value.value),
        htc_ext_le_htc_lower: if hypotheses { le(htc_ext.value.value, htc_lower.value) } else { None },
    };
    Ok(InvariantSummary { n, m_max, zcl, htc_lower, ext_zcl, htc_ext, criterion, chain })
}
