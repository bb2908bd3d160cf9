//! Free graded-commutative algebras `ΛV` and free tensor algebras `TV`.
//!
//! Internally every degree is cohomological: a tensor-flavor generator of
//! homological degree `n` lives in degree `-n`, so every differential raises
//! the internal degree by one. Natural degrees are used only for I/O.
//!
//! A [`Mono`] is an exponent vector (commutative flavor, one entry per
//! generator in presentation order) or a word of generator indices (tensor
//! flavor). Commutative monomials are canonical: the generator order of the
//! presentation is the multiplication order and Koszul signs live in the
//! coefficient.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

use crate::field::{FieldSpec, Scalar};
use crate::linalg::SparseVec;

pub type Mono = SmallVec<[u16; 8]>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Flavor {
    /// Free graded-commutative, cohomologically graded (Sullivan).
    Commutative,
    /// Free tensor, homologically graded (Adams–Hilton).
    Tensor,
}

impl Flavor {
    pub fn keyword(self) -> &'static str {
        match self {
            Flavor::Commutative => "sullivan",
            Flavor::Tensor => "adams-hilton",
        }
    }

    /// Internal degree of something of natural degree `n`.
    pub fn internal(self, n: i32) -> i32 {
        match self {
            Flavor::Commutative => n,
            Flavor::Tensor => -n,
        }
    }

    /// Natural degree of something of internal degree `k`.
    pub fn natural(self, k: i32) -> i32 {
        self.internal(k)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    /// Natural degree (cohomological for Sullivan, homological for tensor).
    pub degree: i32,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: i32) -> Self {
        Generator { name: name.into(), degree }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("generator `{name}` has degree {degree}; minimum is {min}")]
    DegreeTooLow { name: String, degree: i32, min: i32 },
    #[error("differential count {got} does not match generator count {expected}")]
    DifferentialCount { expected: usize, got: usize },
    #[error("malformed monomial in the differential of `{0}`")]
    MalformedMonomial(String),
    #[error("presentations differ")]
    MixedPresentations,
}

/// A polynomial: canonical monomials with nonzero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: BTreeMap<Mono, Scalar>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn monomial(m: Mono, c: Scalar) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Mono) -> Option<&Scalar> {
        self.terms.get(m)
    }

    pub fn add_term(&mut self, m: Mono, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: &Scalar, other: &Poly) {
        for (m, v) in &other.terms {
            self.add_term(m.clone(), c * v);
        }
    }

    pub fn scaled(&self, c: &Scalar) -> Poly {
        let mut out = Poly::zero();
        out.axpy(c, self);
        out
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Mono, Scalar)> {
        self.terms.into_iter()
    }
}

impl FromIterator<(Mono, Scalar)> for Poly {
    fn from_iter<I: IntoIterator<Item = (Mono, Scalar)>>(iter: I) -> Self {
        let mut p = Poly::zero();
        for (m, c) in iter {
            p.add_term(m, c);
        }
        p
    }
}

/// A derivation of internal degree `degree`, given on generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub degree: i32,
    pub images: Vec<Poly>,
}

/// Canonical basis of one internal degree.
#[derive(Debug)]
pub struct DegreeBasis {
    pub monos: Vec<Mono>,
    index: HashMap<Mono, usize>,
}

impl DegreeBasis {
    fn new(monos: Vec<Mono>) -> Self {
        let index = monos.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        DegreeBasis { monos, index }
    }

    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn index_of(&self, m: &Mono) -> Option<usize> {
        self.index.get(m).copied()
    }
}

/// Why a presentation fails `check_differential`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `d(gen)` has a term of the wrong internal degree.
    Inhomogeneous { generator: String, expected: i32, found: i32 },
    /// `d(d(gen)) ≠ 0`.
    SquareNonzero { generator: String, residue: Poly },
    /// `d(gen)` has a constant term, so `d` does not preserve the augmentation.
    ConstantTerm { generator: String },
}

/// A free graded algebra with differential: field, flavor, generators in
/// canonical order and `d` on generators.
#[derive(Debug)]
pub struct Presentation {
    field: FieldSpec,
    flavor: Flavor,
    gens: Vec<Generator>,
    deg: Vec<i32>,
    odd: Vec<bool>,
    diff: Derivation,
    cache: RwLock<HashMap<i32, Arc<DegreeBasis>>>,
}

impl Clone for Presentation {
    fn clone(&self) -> Self {
        Presentation {
            field: self.field,
            flavor: self.flavor,
            gens: self.gens.clone(),
            deg: self.deg.clone(),
            odd: self.odd.clone(),
            diff: self.diff.clone(),
            cache: RwLock::new(HashMap::new()),
        }
    }
}

impl PartialEq for Presentation {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.flavor == other.flavor
            && self.gens == other.gens
            && self.diff == other.diff
    }
}

impl Presentation {
    /// Builds a presentation with generators in the given order. Checks names
    /// and monomial shapes; `check_differential` checks degrees and `d² = 0`.
    pub fn new(
        field: FieldSpec,
        flavor: Flavor,
        gens: Vec<Generator>,
        diff: Vec<Poly>,
    ) -> Result<Self, AlgebraError> {
        if diff.len() != gens.len() {
            return Err(AlgebraError::DifferentialCount { expected: gens.len(), got: diff.len() });
        }
        let mut seen = std::collections::HashSet::new();
        for g in &gens {
            if !seen.insert(g.name.as_str()) {
                return Err(AlgebraError::DuplicateGenerator(g.name.clone()));
            }
            if g.degree < 1 {
                return Err(AlgebraError::DegreeTooLow { name: g.name.clone(), degree: g.degree, min: 1 });
            }
        }
        let deg: Vec<i32> = gens.iter().map(|g| flavor.internal(g.degree)).collect();
        let odd: Vec<bool> = gens.iter().map(|g| g.degree.rem_euclid(2) == 1).collect();
        for (g, p) in gens.iter().zip(&diff) {
            for (m, _) in p.terms() {
                let ok = match flavor {
                    Flavor::Commutative => {
                        m.len() == gens.len() && m.iter().zip(&odd).all(|(e, o)| !*o || *e <= 1)
                    }
                    Flavor::Tensor => m.iter().all(|&l| (l as usize) < gens.len()),
                };
                if !ok {
                    return Err(AlgebraError::MalformedMonomial(g.name.clone()));
                }
            }
        }
        Ok(Presentation {
            field,
            flavor,
            gens,
            deg,
            odd,
            diff: Derivation { degree: 1, images: diff },
            cache: RwLock::new(HashMap::new()),
        })
    }

    /// The ground field as a presentation with no generators.
    pub fn point(field: FieldSpec, flavor: Flavor) -> Self {
        Presentation::new(field, flavor, Vec::new(), Vec::new()).expect("point is valid")
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn ngens(&self) -> usize {
        self.gens.len()
    }

    pub fn differential(&self) -> &Derivation {
        &self.diff
    }

    /// Internal degree of generator `i`.
    pub fn gen_degree(&self, i: usize) -> i32 {
        self.deg[i]
    }

    pub fn gen_odd(&self, i: usize) -> bool {
        self.odd[i]
    }

    pub fn gen_index(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    pub fn one_mono(&self) -> Mono {
        match self.flavor {
            Flavor::Commutative => SmallVec::from_elem(0, self.gens.len()),
            Flavor::Tensor => SmallVec::new(),
        }
    }

    pub fn gen_mono(&self, i: usize) -> Mono {
        match self.flavor {
            Flavor::Commutative => {
                let mut m = self.one_mono();
                m[i] = 1;
                m
            }
            Flavor::Tensor => smallvec::smallvec![i as u16],
        }
    }

    pub fn one(&self) -> Poly {
        Poly::monomial(self.one_mono(), self.field.one())
    }

    pub fn gen_poly(&self, i: usize) -> Poly {
        Poly::monomial(self.gen_mono(i), self.field.one())
    }

    pub fn scalar_poly(&self, c: Scalar) -> Poly {
        Poly::monomial(self.one_mono(), c)
    }

    /// Internal degree of a monomial.
    pub fn mono_degree(&self, m: &Mono) -> i32 {
        match self.flavor {
            Flavor::Commutative => m.iter().zip(&self.deg).map(|(e, d)| *e as i32 * d).sum(),
            Flavor::Tensor => m.iter().map(|&l| self.deg[l as usize]).sum(),
        }
    }

    pub fn mono_odd(&self, m: &Mono) -> bool {
        self.mono_degree(m).rem_euclid(2) == 1
    }

    /// Internal degree of a homogeneous polynomial (`None` for zero or
    /// inhomogeneous input).
    pub fn poly_degree(&self, p: &Poly) -> Option<i32> {
        let mut it = p.terms().map(|(m, _)| self.mono_degree(m));
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// Product of two monomials: `None` when it vanishes, else the sign
    /// (`true` = negative) and the canonical monomial.
    pub fn mul_mono(&self, a: &Mono, b: &Mono) -> Option<(bool, Mono)> {
        match self.flavor {
            Flavor::Tensor => {
                let mut w = a.clone();
                w.extend_from_slice(b);
                Some((false, w))
            }
            Flavor::Commutative => {
                let n = self.gens.len();
                let mut out: Mono = SmallVec::with_capacity(n);
                let mut odd_after = 0u32;
                let mut sign = false;
                for i in (0..n).rev() {
                    if self.odd[i] {
                        if a[i] > 0 && b[i] > 0 {
                            return None;
                        }
                        if b[i] > 0 && odd_after % 2 == 1 {
                            sign = !sign;
                        }
                        if a[i] > 0 {
                            odd_after += 1;
                        }
                    }
                }
                for i in 0..n {
                    out.push(a[i] + b[i]);
                }
                Some((sign, out))
            }
        }
    }

    pub fn mul(&self, p: &Poly, q: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (a, ca) in p.terms() {
            for (b, cb) in q.terms() {
                if let Some((neg, m)) = self.mul_mono(a, b) {
                    out.add_term(m, (ca * cb).signed(neg));
                }
            }
        }
        out
    }

    /// `c · a · p · b` for monomials `a`, `b`.
    fn sandwich(&self, a: &Mono, p: &Poly, b: &Mono, c: &Scalar, out: &mut Poly) {
        for (m, cm) in p.terms() {
            let Some((s1, am)) = self.mul_mono(a, m) else { continue };
            let Some((s2, amb)) = self.mul_mono(&am, b) else { continue };
            out.add_term(amb, (c * cm).signed(s1 ^ s2));
        }
    }

    /// Extends `theta` from generators to `p` by the graded Leibniz rule
    /// `θ(ab) = θ(a)b + (−1)^{|θ||a|} a θ(b)`.
    pub fn apply_derivation(&self, theta: &Derivation, p: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in p.terms() {
            self.derive_mono_into(theta, m, c, &mut out);
        }
        out
    }

    fn derive_mono_into(&self, theta: &Derivation, m: &Mono, c: &Scalar, out: &mut Poly) {
        let theta_odd = theta.degree.rem_euclid(2) == 1;
        match self.flavor {
            Flavor::Tensor => {
                let mut prefix_deg = 0i32;
                for (j, &l) in m.iter().enumerate() {
                    let l = l as usize;
                    if !theta.images[l].is_zero() {
                        let left: Mono = m[..j].iter().copied().collect();
                        let right: Mono = m[j + 1..].iter().copied().collect();
                        let neg = theta_odd && prefix_deg.rem_euclid(2) == 1;
                        self.sandwich(&left, &theta.images[l], &right, &c.clone().signed(neg), out);
                    }
                    prefix_deg += self.deg[l];
                }
            }
            Flavor::Commutative => {
                let n = self.gens.len();
                let mut prefix_deg = 0i32;
                for i in 0..n {
                    let e = m[i];
                    if e == 0 {
                        continue;
                    }
                    if !theta.images[i].is_zero() {
                        // m = L · v^e · R and θ(v^e) = e·v^{e-1}·θ(v) (e = 1 when v is odd).
                        let mut left: Mono = SmallVec::from_elem(0, n);
                        left[..i].copy_from_slice(&m[..i]);
                        left[i] = e - 1;
                        let mut right: Mono = SmallVec::from_elem(0, n);
                        right[i + 1..].copy_from_slice(&m[i + 1..]);
                        let neg = theta_odd && prefix_deg.rem_euclid(2) == 1;
                        let coeff = (c * &self.field.from_i64(e as i64)).signed(neg);
                        self.sandwich(&left, &theta.images[i], &right, &coeff, out);
                    }
                    prefix_deg += e as i32 * self.deg[i];
                }
            }
        }
    }

    pub fn d(&self, p: &Poly) -> Poly {
        self.apply_derivation(&self.diff, p)
    }

    pub fn d_mono(&self, m: &Mono) -> Poly {
        let mut out = Poly::zero();
        self.derive_mono_into(&self.diff, m, &self.field.one(), &mut out);
        out
    }

    /// Canonical basis of internal degree `n`, cached.
    pub fn basis(&self, n: i32) -> Arc<DegreeBasis> {
        if let Some(b) = self.cache.read().unwrap().get(&n) {
            return b.clone();
        }
        let b = Arc::new(DegreeBasis::new(self.enumerate(n)));
        self.cache.write().unwrap().entry(n).or_insert(b).clone()
    }

    /// Basis of natural degree `n`.
    pub fn basis_of_degree(&self, n: i32) -> Vec<Mono> {
        self.basis(self.flavor.internal(n)).monos.clone()
    }

    pub fn dim(&self, n: i32) -> usize {
        self.basis(n).len()
    }

    fn enumerate(&self, n: i32) -> Vec<Mono> {
        match self.flavor {
            Flavor::Commutative => {
                let mut out = Vec::new();
                let mut cur: Mono = SmallVec::from_elem(0, self.gens.len());
                self.enum_comm(0, n, &mut cur, &mut out);
                out.sort();
                out
            }
            Flavor::Tensor => {
                let mut out = Vec::new();
                let mut cur: Mono = SmallVec::new();
                self.enum_words(n, &mut cur, &mut out);
                out
            }
        }
    }

    fn enum_comm(&self, i: usize, rest: i32, cur: &mut Mono, out: &mut Vec<Mono>) {
        if i == self.gens.len() {
            if rest == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let d = self.deg[i];
        // All commutative generators have positive degree.
        let cap = (rest / d).max(0) as u16;
        let max = if self.odd[i] { cap.min(1) } else { cap };
        for e in 0..=max {
            cur[i] = e;
            self.enum_comm(i + 1, rest - e as i32 * d, cur, out);
        }
        cur[i] = 0;
    }

    fn enum_words(&self, rest: i32, cur: &mut Mono, out: &mut Vec<Mono>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for (l, &d) in self.deg.iter().enumerate() {
            // Tensor degrees are negative internally.
            if d >= rest {
                cur.push(l as u16);
                self.enum_words(rest - d, cur, out);
                cur.pop();
            }
        }
    }

    /// Coordinates of a homogeneous `p` of internal degree `n`.
    pub fn coords(&self, p: &Poly, n: i32) -> SparseVec {
        let b = self.basis(n);
        SparseVec::from_entries(
            p.terms()
                .map(|(m, c)| {
                    let i = b.index_of(m).unwrap_or_else(|| {
                        panic!("monomial {} is not in degree {n}", self.format_mono(m))
                    });
                    (i, c.clone())
                })
                .collect(),
        )
    }

    pub fn from_coords(&self, n: i32, v: &SparseVec) -> Poly {
        let b = self.basis(n);
        v.iter().map(|(i, c)| (b.monos[*i].clone(), c.clone())).collect()
    }

    /// Checks degrees of `d` on generators and `d∘d = 0`, reporting the first
    /// violating generator. Generators of natural degree above `up_to` are
    /// skipped when a bound is given.
    pub fn check_differential(&self, up_to: Option<i32>) -> Result<(), Violation> {
        for (i, g) in self.gens.iter().enumerate() {
            if up_to.is_some_and(|u| g.degree > u) {
                continue;
            }
            let expected = self.deg[i] + 1;
            for (m, _) in self.diff.images[i].terms() {
                if self.word_length(m) == 0 {
                    return Err(Violation::ConstantTerm { generator: g.name.clone() });
                }
                let found = self.mono_degree(m);
                if found != expected {
                    return Err(Violation::Inhomogeneous {
                        generator: g.name.clone(),
                        expected: self.flavor.natural(expected),
                        found: self.flavor.natural(found),
                    });
                }
            }
        }
        for (i, g) in self.gens.iter().enumerate() {
            if up_to.is_some_and(|u| g.degree > u) {
                continue;
            }
            let dd = self.d(&self.diff.images[i]);
            if !dd.is_zero() {
                return Err(Violation::SquareNonzero { generator: g.name.clone(), residue: dd });
            }
        }
        Ok(())
    }

    /// True when `d(V)` has no linear part (`d(V) ⊂ Λ^{≥2}V`, resp. `T^{≥2}V`).
    pub fn linear_part_vanishes(&self) -> bool {
        self.diff.images.iter().all(|p| p.terms().all(|(m, _)| self.word_length(m) != 1))
    }

    /// Number of generator factors in a monomial.
    pub fn word_length(&self, m: &Mono) -> usize {
        match self.flavor {
            Flavor::Commutative => m.iter().map(|&e| e as usize).sum(),
            Flavor::Tensor => m.len(),
        }
    }

    pub fn format_mono(&self, m: &Mono) -> String {
        let mut parts: Vec<String> = Vec::new();
        match self.flavor {
            Flavor::Commutative => {
                for (i, &e) in m.iter().enumerate() {
                    match e {
                        0 => {}
                        1 => parts.push(self.gens[i].name.clone()),
                        e => parts.push(format!("{}^{}", self.gens[i].name, e)),
                    }
                }
            }
            Flavor::Tensor => {
                let mut k = 0;
                while k < m.len() {
                    let l = m[k];
                    let mut run = 1;
                    while k + run < m.len() && m[k + run] == l {
                        run += 1;
                    }
                    let name = &self.gens[l as usize].name;
                    if run == 1 {
                        parts.push(name.clone());
                    } else {
                        parts.push(format!("{name}^{run}"));
                    }
                    k += run;
                }
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }

    /// Text form in the model language's expression syntax.
    pub fn format_poly(&self, p: &Poly) -> String {
        if p.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (k, (m, c)) in p.terms().enumerate() {
            let (neg, mag) = if c.is_negative() { (true, -c) } else { (false, c.clone()) };
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono = self.format_mono(m);
            if mono == "1" {
                let _ = write!(s, "{mag}");
            } else if mag.is_one() {
                s.push_str(&mono);
            } else {
                let _ = write!(s, "{mag}*{mono}");
            }
        }
        s
    }

    /// Same generators and field, new differential.
    pub fn with_differential(&self, diff: Vec<Poly>) -> Result<Self, AlgebraError> {
        Presentation::new(self.field, self.flavor, self.gens.clone(), diff)
    }
}
