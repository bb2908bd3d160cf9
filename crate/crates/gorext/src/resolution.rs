//! Semi-free resolutions of the ground field.
//!
//! Both flavors are reduced to a [`SemiFreeModule`]: a free `A`-module on a
//! graded semibasis with `δ(m_i) = Σ_j c_ij · m_j`, `c_ij ∈ A`, and
//! `δ(b·m) = db·m + (−1)^{|b|} b·δ(m)`.
//!
//! * Tensor flavor: `TV ⊗ (K ⊕ sV)` with
//!   `δ(1⊗sv) = v⊗1 − S(dv)`, where `S(w'ℓ) = (−1)^{|w'|} w'⊗sℓ`.
//! * Commutative flavor: the cdga `Λ(V ⊕ sV)` with `δ(sv) = v − c_v`,
//!   `δ(c_v) = dv`, truncated to semibasis monomials of filtration weight
//!   at most a bound `W`. Every such truncation is a sub-dg-module.

use std::collections::HashMap;
use std::sync::Arc;

use smallvec::SmallVec;
use thiserror::Error;

use crate::algebra::{Derivation, Flavor, Generator, Mono, Poly, Presentation};
use crate::field::FieldSpec;
use crate::linalg::{Homology, LinalgError, SparseMatrix, Solver, SparseVec};
use crate::parallel::par_map;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResolutionError {
    #[error("expected a {expected} presentation")]
    FlavorMismatch { expected: &'static str },
    #[error("differential is not triangular: cycle through generator `{0}`")]
    NotTriangular(String),
    #[error("cannot solve δ(c) = d({generator}) in degree {degree}; the sub-closure is not acyclic there")]
    Unsolvable { generator: String, degree: i32 },
    #[error("comparison lift obstructed at `{generator}` (degree {degree}); increase weight_bound or choose another lift")]
    LiftObstructed { generator: String, degree: i32 },
    #[error("closures are over different base algebras")]
    BaseMismatch,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemiGen {
    pub label: String,
    /// Internal (cohomological) degree.
    pub degree: i32,
}

/// A free module over `base` on `gens`, with `delta[i] = [(j, c_ij)]`.
#[derive(Clone, Debug)]
pub struct SemiFreeModule {
    pub base: Arc<Presentation>,
    pub gens: Vec<SemiGen>,
    pub delta: Vec<Vec<(usize, Poly)>>,
}

/// Homology of a total complex found where the closure should be acyclic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    /// Natural degree.
    pub degree: i32,
    pub dimension: usize,
}

impl SemiFreeModule {
    pub fn field(&self) -> FieldSpec {
        self.base.field()
    }

    /// `δ(b·m_i)` as `[(j, poly)]`.
    pub fn delta_of(&self, i: usize, b: &Poly) -> Vec<(usize, Poly)> {
        let a = &self.base;
        let mut out: Vec<(usize, Poly)> = Vec::new();
        let mut push = |j: usize, p: Poly| {
            if p.is_zero() {
                return;
            }
            if let Some(e) = out.iter_mut().find(|e| e.0 == j) {
                e.1 = e.1.add(&p);
            } else {
                out.push((j, p));
            }
        };
        push(i, a.d(b));
        for (j, c) in &self.delta[i] {
            // Signs by term: b may be inhomogeneous only in tests.
            for (m, cm) in b.terms() {
                let sign = a.mono_odd(m);
                let term = Poly::monomial(m.clone(), cm.clone().signed(sign));
                push(*j, a.mul(&term, c));
            }
        }
        out.retain(|e| !e.1.is_zero());
        out.sort_by_key(|e| e.0);
        out
    }

    /// Checks `δ² = 0` on every semibasis element; returns the first failure.
    pub fn check_delta_squared(&self) -> Result<(), usize> {
        for i in 0..self.gens.len() {
            let mut acc: HashMap<usize, Poly> = HashMap::new();
            for (j, c) in &self.delta[i] {
                for (k, p) in self.delta_of(*j, c) {
                    let e = acc.entry(k).or_default();
                    *e = e.add(&p);
                }
            }
            if acc.values().any(|p| !p.is_zero()) {
                return Err(i);
            }
        }
        Ok(())
    }

    /// Basis of the total complex in internal degree `n`: pairs
    /// `(semibasis index, base basis index)`.
    fn total_basis(&self, n: i32) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, g) in self.gens.iter().enumerate() {
            let b = self.base.basis(n - g.degree);
            for k in 0..b.len() {
                out.push((i, k));
            }
        }
        out
    }

    /// Matrix of `δ` from internal degree `n` to `n + 1` of the total complex.
    pub fn total_differential(&self, n: i32) -> SparseMatrix {
        let src = self.total_basis(n);
        let tgt = self.total_basis(n + 1);
        let index: HashMap<(usize, usize), usize> = tgt.iter().enumerate().map(|(k, p)| (*p, k)).collect();
        let cols = par_map(&src, |&(i, k)| {
            let deg = n - self.gens[i].degree;
            let b = self.base.basis(deg);
            let elem = Poly::monomial(b.monos[k].clone(), self.field().one());
            let mut entries = Vec::new();
            for (j, p) in self.delta_of(i, &elem) {
                let tdeg = n + 1 - self.gens[j].degree;
                let tb = self.base.basis(tdeg);
                for (m, c) in p.terms() {
                    let kk = tb.index_of(m).expect("δ lands in the expected degree");
                    entries.push((index[&(j, kk)], c.clone()));
                }
            }
            SparseVec::from_entries(entries)
        });
        SparseMatrix::from_columns(self.field(), tgt.len(), cols)
    }

    /// Homology of the total complex at internal degree `n`.
    pub fn total_homology(&self, n: i32) -> Result<usize, LinalgError> {
        let d_in = self.total_differential(n - 1);
        let d_out = self.total_differential(n);
        Ok(Homology::compute(self.field(), &d_in, &d_out)?.dim)
    }
}

/// The tensor-flavor acyclic closure `TV ⊗ (K ⊕ sV)`.
#[derive(Clone, Debug)]
pub struct AhClosure {
    pub module: SemiFreeModule,
}

pub fn ah_acyclic_closure(pres: Arc<Presentation>) -> Result<AhClosure, ResolutionError> {
    if pres.flavor() != Flavor::Tensor {
        return Err(ResolutionError::FlavorMismatch { expected: "tensor" });
    }
    let n = pres.ngens();
    let mut gens = vec![SemiGen { label: "1".to_string(), degree: 0 }];
    for (i, g) in pres.generators().iter().enumerate() {
        gens.push(SemiGen { label: format!("s{}", g.name), degree: pres.gen_degree(i) - 1 });
    }
    let mut delta = vec![Vec::new()];
    for v in 0..n {
        // δ(1⊗sv) = v⊗1 − S(dv).
        let mut entries: Vec<(usize, Poly)> = vec![(0, pres.gen_poly(v))];
        let mut by_letter: Vec<Poly> = vec![Poly::zero(); n];
        for (w, c) in pres.differential().images[v].terms() {
            let (&last, prefix) = w.split_last().expect("d(v) has no constant term");
            let prefix: Mono = prefix.iter().copied().collect();
            let sign = pres.mono_odd(&prefix);
            by_letter[last as usize].add_term(prefix, (-c).signed(sign));
        }
        for (l, p) in by_letter.into_iter().enumerate() {
            if !p.is_zero() {
                entries.push((l + 1, p));
            }
        }
        delta.push(entries);
    }
    Ok(AhClosure { module: SemiFreeModule { base: pres, gens, delta } })
}

impl AhClosure {
    /// `S(z)` for a word `z = w'ℓ`: `(−1)^{|w'|} w' ⊗ sℓ`.
    fn contraction(&self, w: &Mono) -> Option<(usize, Mono, bool)> {
        let (&last, prefix) = w.split_last()?;
        let prefix: Mono = prefix.iter().copied().collect();
        let sign = self.module.base.mono_odd(&prefix);
        Some((last as usize + 1, prefix, sign))
    }

    /// Checks `δs + sδ = id − ηε` on every basis element `z⊗1` and `z⊗sv`
    /// of natural total degree at most `max_degree`.
    pub fn check_contracting_homotopy(&self, max_degree: i32) -> Result<(), String> {
        let m = &self.module;
        let a = &m.base;
        let field = a.field();
        // s on a module element given as (semibasis index, poly).
        let s = |i: usize, p: &Poly| -> Vec<(usize, Poly)> {
            let mut out: Vec<(usize, Poly)> = Vec::new();
            if i != 0 {
                return out;
            }
            for (w, c) in p.terms() {
                if let Some((j, pre, neg)) = self.contraction(w) {
                    out.push((j, Poly::monomial(pre, c.clone().signed(neg))));
                }
            }
            out
        };
        let add = |acc: &mut HashMap<usize, Poly>, parts: Vec<(usize, Poly)>| {
            for (j, p) in parts {
                let e = acc.entry(j).or_default();
                *e = e.add(&p);
            }
        };
        for total in 0..=max_degree {
            for (i, g) in m.gens.iter().enumerate() {
                let nat = Flavor::Tensor.natural(g.degree);
                if nat > total {
                    continue;
                }
                for w in a.basis_of_degree(total - nat) {
                    let z = Poly::monomial(w.clone(), field.one());
                    let mut acc: HashMap<usize, Poly> = HashMap::new();
                    for (j, sp) in s(i, &z) {
                        add(&mut acc, m.delta_of(j, &sp));
                    }
                    for (j, dp) in m.delta_of(i, &z) {
                        add(&mut acc, s(j, &dp));
                    }
                    let mut expected: HashMap<usize, Poly> = HashMap::new();
                    if !(i == 0 && w.is_empty()) {
                        expected.insert(i, z.clone());
                    }
                    let mut diff = acc;
                    for (j, p) in expected {
                        let e = diff.entry(j).or_default();
                        *e = e.sub(&p);
                    }
                    if diff.values().any(|p| !p.is_zero()) {
                        return Err(format!("δs + sδ ≠ id on {}⊗{}", a.format_mono(&w), g.label));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The commutative-flavor closure as a cdga `Λ(V ⊕ sV ⊕ …)` with `copies`
/// blocks of fiber generators (one for a resolution, two for the tensor
/// square). Generators of `total` are ordered: `V`, then each fiber block.
#[derive(Clone, Debug)]
pub struct SullivanClosure {
    pub base: Arc<Presentation>,
    pub total: Arc<Presentation>,
    pub copies: usize,
    /// Filtration weight of each fiber generator; `len = copies * |V|`.
    pub weights: Vec<u32>,
    /// Order in which generators of `V` were closed.
    pub order: Vec<usize>,
}

fn embed(total_gens: usize, p: &Poly) -> Poly {
    p.terms()
        .map(|(m, c)| {
            let mut e: Mono = m.clone();
            e.resize(total_gens, 0);
            (e, c.clone())
        })
        .collect()
}

/// Topological order of generators: `v` after every generator in `dv`, ties
/// broken by presentation order.
fn closing_order(pres: &Presentation) -> Result<Vec<usize>, ResolutionError> {
    let n = pres.ngens();
    let deps: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut d: Vec<usize> = Vec::new();
            for (m, _) in pres.differential().images[i].terms() {
                for (j, &e) in m.iter().enumerate() {
                    if e > 0 && !d.contains(&j) {
                        d.push(j);
                    }
                }
            }
            d
        })
        .collect();
    let mut done = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let next = (0..n).find(|&i| !done[i] && deps[i].iter().all(|&j| done[j] && j != i));
        match next {
            Some(i) => {
                done[i] = true;
                order.push(i);
            }
            None => {
                let i = (0..n).find(|&i| !done[i]).unwrap();
                return Err(ResolutionError::NotTriangular(pres.generators()[i].name.clone()));
            }
        }
    }
    Ok(order)
}

fn fiber_name(name: &str, copy: usize) -> String {
    if copy == 0 {
        format!("s({name})")
    } else {
        format!("s{}({name})", "'".repeat(copy))
    }
}

/// Weighted fiber part of a total monomial.
fn fiber_weight(m: &Mono, k: usize, weights: &[u32]) -> u32 {
    m[k..].iter().zip(weights).map(|(&e, &w)| e as u32 * w).sum()
}

/// Builds `Λ(V ⊕ sV)` with `δ(sv) = v − c_v`, choosing `c_v` of least
/// filtration weight the solver finds.
pub fn sullivan_acyclic_closure(pres: Arc<Presentation>) -> Result<SullivanClosure, ResolutionError> {
    if pres.flavor() != Flavor::Commutative {
        return Err(ResolutionError::FlavorMismatch { expected: "commutative" });
    }
    let field = pres.field();
    let k = pres.ngens();
    let order = closing_order(&pres)?;
    let mut gens: Vec<Generator> = pres.generators().to_vec();
    for i in 0..k {
        gens.push(Generator::new(fiber_name(&pres.generators()[i].name, 0), pres.gen_degree(i) - 1));
    }
    let nt = 2 * k;
    let mut images: Vec<Poly> = (0..k).map(|i| embed(nt, &pres.differential().images[i])).collect();
    images.extend((0..k).map(|_| Poly::zero()));
    let scratch = Presentation::new(field, Flavor::Commutative, gens.clone(), images.clone())
        .expect("closure generators are well formed");
    let mut weights = vec![0u32; k];
    let mut allowed = vec![false; nt];
    for &v in &order {
        let deg = pres.gen_degree(v);
        weights[v] = (deg - 1) as u32;
        let target = embed(nt, &pres.differential().images[v]);
        let c = if target.is_zero() {
            Poly::zero()
        } else {
            let theta = Derivation { degree: 1, images: images.clone() };
            let basis = scratch.basis(deg);
            let cands: Vec<&Mono> = basis
                .monos
                .iter()
                .filter(|m| m.iter().enumerate().all(|(j, &e)| e == 0 || allowed[j]))
                .collect();
            let max_w = cands.iter().map(|m| fiber_weight(m, k, &weights)).max().unwrap_or(0);
            let tb = scratch.basis(deg + 1);
            let rhs = scratch.coords(&target, deg + 1);
            let mut found = None;
            let mut bound = weights[v];
            loop {
                let chosen: Vec<&Mono> =
                    cands.iter().copied().filter(|m| fiber_weight(m, k, &weights) <= bound).collect();
                let cols: Vec<SparseVec> = chosen
                    .iter()
                    .map(|m| {
                        let img = scratch.apply_derivation(&theta, &Poly::monomial((*m).clone(), field.one()));
                        scratch.coords(&img, deg + 1)
                    })
                    .collect();
                let a = SparseMatrix::from_columns(field, tb.len(), cols);
                if let Some(x) = Solver::new(&a).solve(&rhs)? {
                    found = Some(x.iter().map(|(i, c)| (chosen[*i].clone(), c.clone())).collect::<Poly>());
                    break;
                }
                if bound >= max_w {
                    break;
                }
                bound += 1;
            }
            found.ok_or_else(|| ResolutionError::Unsolvable {
                generator: pres.generators()[v].name.clone(),
                degree: deg,
            })?
        };
        for (m, _) in c.terms() {
            weights[v] = weights[v].max(fiber_weight(m, k, &weights));
        }
        // δ(sv) = v − c_v.
        let mut img = embed(nt, &pres.gen_poly(v));
        img = img.sub(&c);
        images[k + v] = img;
        allowed[v] = true;
        allowed[k + v] = true;
    }
    let total = Presentation::new(field, Flavor::Commutative, gens, images).expect("closure is well formed");
    debug_assert!(total.check_differential(None).is_ok());
    Ok(SullivanClosure { base: pres, total: Arc::new(total), copies: 1, weights, order })
}

impl SullivanClosure {
    pub fn nbase(&self) -> usize {
        self.base.ngens()
    }

    /// Fiber monomials (exponent vectors over the fiber generators) of
    /// weight at most `bound`, sorted by (degree, monomial).
    pub fn fiber_monomials(&self, bound: u32) -> Vec<Mono> {
        let k = self.nbase();
        let nf = self.copies * k;
        let degs: Vec<i32> = (0..nf).map(|j| self.total.gen_degree(k + j)).collect();
        let odd: Vec<bool> = (0..nf).map(|j| self.total.gen_odd(k + j)).collect();
        let mut out = Vec::new();
        let mut cur: Mono = SmallVec::from_elem(0, nf);
        fn rec(j: usize, rest: u32, w: &[u32], odd: &[bool], cur: &mut Mono, out: &mut Vec<Mono>) {
            if j == w.len() {
                out.push(cur.clone());
                return;
            }
            let cap = rest / w[j].max(1);
            let cap = if odd[j] { cap.min(1) } else { cap };
            for e in 0..=cap {
                cur[j] = e as u16;
                rec(j + 1, rest - e * w[j], w, odd, cur, out);
            }
            cur[j] = 0;
        }
        rec(0, bound, &self.weights, &odd, &mut cur, &mut out);
        out.sort_by_key(|m| (m.iter().zip(&degs).map(|(&e, &d)| e as i32 * d).sum::<i32>(), m.clone()));
        out
    }

    /// The semi-free module on fiber monomials of weight at most `bound`.
    pub fn truncate(&self, bound: u32) -> SemiFreeModule {
        let k = self.nbase();
        let fibers = self.fiber_monomials(bound);
        let index: HashMap<Mono, usize> = fibers.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let nt = self.total.ngens();
        let gens: Vec<SemiGen> = fibers
            .iter()
            .map(|f| {
                let mut m: Mono = SmallVec::from_elem(0, nt);
                m[k..].copy_from_slice(f);
                SemiGen { label: self.total.format_mono(&m), degree: self.total.mono_degree(&m) }
            })
            .collect();
        let delta = par_map(&fibers, |f| {
            let mut m: Mono = SmallVec::from_elem(0, nt);
            m[k..].copy_from_slice(f);
            let d = self.total.d_mono(&m);
            let mut parts: HashMap<usize, Poly> = HashMap::new();
            for (tm, c) in d.terms() {
                let bpart: Mono = tm[..k].iter().copied().collect();
                let fpart: Mono = tm[k..].iter().copied().collect();
                let j = *index.get(&fpart).expect("weight truncation is closed under δ");
                parts.entry(j).or_default().add_term(bpart, c.clone());
            }
            let mut v: Vec<(usize, Poly)> = parts.into_iter().filter(|e| !e.1.is_zero()).collect();
            v.sort_by_key(|e| e.0);
            v
        });
        SemiFreeModule { base: self.base.clone(), gens, delta }
    }

    /// Homology of the (untruncated) closure at internal degree `n`.
    pub fn homology_at(&self, n: i32) -> Result<usize, LinalgError> {
        let t = &self.total;
        let mat = |d: i32| -> SparseMatrix {
            let src = t.basis(d);
            let tgt = t.basis(d + 1);
            let cols = par_map(&src.monos, |m| t.coords(&t.d_mono(m), d + 1));
            SparseMatrix::from_columns(t.field(), tgt.len(), cols)
        };
        Ok(Homology::compute(t.field(), &mat(n - 1), &mat(n))?.dim)
    }
}

/// `P ⊗_{ΛV} P = Λ(V ⊕ sV ⊕ s'V)` with the second block a renamed copy.
pub fn tensor_square_resolution(p: &SullivanClosure) -> Result<SullivanClosure, ResolutionError> {
    if p.copies != 1 {
        return Err(ResolutionError::FlavorMismatch { expected: "single-copy commutative" });
    }
    let k = p.nbase();
    let field = p.base.field();
    let mut gens: Vec<Generator> = p.total.generators().to_vec();
    for i in 0..k {
        gens.push(Generator::new(fiber_name(&p.base.generators()[i].name, 1), p.base.gen_degree(i) - 1));
    }
    let nt = 3 * k;
    let widen = |poly: &Poly, second: bool| -> Poly {
        poly.terms()
            .map(|(m, c)| {
                let mut e: Mono = SmallVec::from_elem(0, nt);
                e[..k].copy_from_slice(&m[..k]);
                let off = if second { 2 * k } else { k };
                e[off..off + k].copy_from_slice(&m[k..2 * k]);
                (e, c.clone())
            })
            .collect()
    };
    let mut images: Vec<Poly> = (0..2 * k).map(|i| widen(&p.total.differential().images[i], false)).collect();
    for i in 0..k {
        images.push(widen(&p.total.differential().images[k + i], true));
    }
    let total = Presentation::new(field, Flavor::Commutative, gens, images).expect("tensor square is well formed");
    let mut weights = p.weights.clone();
    weights.extend_from_slice(&p.weights);
    Ok(SullivanClosure {
        base: p.base.clone(),
        total: Arc::new(total),
        copies: 2,
        weights,
        order: p.order.clone(),
    })
}

/// Either flavor of closure.
#[derive(Clone, Debug)]
pub enum AcyclicClosure {
    AdamsHilton(AhClosure),
    Sullivan(SullivanClosure),
}

impl AcyclicClosure {
    pub fn build(pres: Arc<Presentation>) -> Result<Self, ResolutionError> {
        match pres.flavor() {
            Flavor::Tensor => Ok(AcyclicClosure::AdamsHilton(ah_acyclic_closure(pres)?)),
            Flavor::Commutative => Ok(AcyclicClosure::Sullivan(sullivan_acyclic_closure(pres)?)),
        }
    }

    /// Checks that the total complex has homology `K` in degree 0 and 0
    /// elsewhere, for natural degrees in `[lo, hi]`.
    pub fn verify_acyclic(&self, lo: i32, hi: i32) -> Result<Result<(), Counterexample>, LinalgError> {
        let degrees: Vec<i32> = (lo..=hi).collect();
        let dims: Vec<Result<usize, LinalgError>> = match self {
            AcyclicClosure::AdamsHilton(c) => par_map(&degrees, |&n| c.module.total_homology(-n)),
            AcyclicClosure::Sullivan(c) => par_map(&degrees, |&n| c.homology_at(n)),
        };
        for (n, d) in degrees.iter().zip(dims) {
            let d = d?;
            let expected = usize::from(*n == 0);
            if d != expected {
                return Ok(Err(Counterexample { degree: *n, dimension: d }));
            }
        }
        Ok(Ok(()))
    }
}

/// How to choose the comparison lift `α: P → Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftChoice {
    /// `α(sv)` from the linear solver, restricted to filtration weight `≤ φ(sv)`.
    Solver,
    /// `α(sv) = sv` in the first block.
    FirstFactor,
    /// `α(sv) = sv` in the second block.
    SecondFactor,
}

/// A multiplicative lift `α: P → Q` over the base, `α(v) = v`.
#[derive(Clone, Debug)]
pub struct ComparisonLift {
    pub source: SullivanClosure,
    pub target: SullivanClosure,
    /// `α(sv)` for each fiber generator of the source.
    pub images: Vec<Poly>,
}

pub fn lift_comparison(
    p: &SullivanClosure,
    q: &SullivanClosure,
    choice: LiftChoice,
) -> Result<ComparisonLift, ResolutionError> {
    if p.base.as_ref() != q.base.as_ref() || p.copies != 1 {
        return Err(ResolutionError::BaseMismatch);
    }
    let k = p.nbase();
    let field = p.base.field();
    let nq = q.total.ngens();
    let block_gen = |copy: usize, v: usize| -> Poly {
        let mut m: Mono = SmallVec::from_elem(0, nq);
        m[k + copy * k + v] = 1;
        Poly::monomial(m, field.one())
    };
    let mut lift = ComparisonLift {
        source: p.clone(),
        target: q.clone(),
        images: vec![Poly::zero(); k],
    };
    match choice {
        LiftChoice::FirstFactor => {
            lift.images = (0..k).map(|v| block_gen(0, v)).collect();
        }
        LiftChoice::SecondFactor => {
            let copy = if q.copies > 1 { 1 } else { 0 };
            lift.images = (0..k).map(|v| block_gen(copy, v)).collect();
        }
        LiftChoice::Solver => {
            for &v in &p.order {
                let deg = p.total.gen_degree(k + v);
                // δ_Q(α(sv)) = α(δ_P(sv)) = v − α(c_v).
                let rhs = lift.apply(&p.total.differential().images[k + v]);
                let basis = q.total.basis(deg);
                let chosen: Vec<&Mono> = basis
                    .monos
                    .iter()
                    .filter(|m| fiber_weight(m, k, &q.weights) <= p.weights[v])
                    .collect();
                let cols: Vec<SparseVec> =
                    chosen.iter().map(|m| q.total.coords(&q.total.d_mono(m), deg + 1)).collect();
                let a = SparseMatrix::from_columns(field, q.total.dim(deg + 1), cols);
                let x = Solver::new(&a).solve(&q.total.coords(&rhs, deg + 1))?.ok_or_else(|| {
                    ResolutionError::LiftObstructed { generator: p.base.generators()[v].name.clone(), degree: deg }
                })?;
                lift.images[v] = x.iter().map(|(i, c)| (chosen[*i].clone(), c.clone())).collect();
            }
        }
    }
    Ok(lift)
}

impl ComparisonLift {
    /// `α` on a polynomial of the source cdga.
    pub fn apply(&self, p: &Poly) -> Poly {
        let k = self.source.nbase();
        let q = &self.target.total;
        let nq = q.ngens();
        let mut out = Poly::zero();
        for (m, c) in p.terms() {
            let mut acc = q.scalar_poly(c.clone());
            for (j, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let img = if j < k {
                    let mut g: Mono = SmallVec::from_elem(0, nq);
                    g[j] = 1;
                    Poly::monomial(g, q.field().one())
                } else {
                    self.images[j - k].clone()
                };
                for _ in 0..e {
                    acc = q.mul(&acc, &img);
                }
            }
            out = out.add(&acc);
        }
        out
    }

    /// `δ_Q ∘ α = α ∘ δ_P` on generators (sufficient for a cdga map).
    pub fn check_chain_map(&self) -> Result<(), String> {
        let p = &self.source.total;
        for j in 0..p.ngens() {
            let lhs = self.target.total.d(&self.apply(&p.gen_poly(j)));
            let rhs = self.apply(&p.differential().images[j]);
            if lhs != rhs {
                return Err(format!("α does not commute with δ on {}", p.generators()[j].name));
            }
        }
        Ok(())
    }
}
