//! `Ext_A(K, A)` per degree, the evaluation map, Gorenstein and
//! formal-dimension verdicts and the product on the commutative side.
//!
//! Degrees are cohomological throughout: for a tensor model the Ext degree
//! `k` is the internal Hom degree, so `Ext^{−q}` is homological degree `q`.
//! Commutative models are truncated at filtration weight `W`; a degree is
//! reported stable when its dimension agrees at `W` and `W + 2`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{Flavor, Mono, Poly, Presentation};
use crate::field::{FieldSpec, Scalar};
use crate::hom::{HomComplex, HomElement};
use crate::linalg::{Homology, LinalgError, SparseMatrix, SparseVec};
use crate::parallel::par_map;
use crate::resolution::{
    ah_acyclic_closure, lift_comparison, sullivan_acyclic_closure, tensor_square_resolution, LiftChoice,
    ResolutionError, SullivanClosure,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtError {
    #[error(transparent)]
    Resolution(#[from] ResolutionError),
    #[error("linear algebra: {0}")]
    Linalg(#[from] LinalgError),
    #[error("generator `{generator}` is odd; over F{p} the commutative closure needs divided powers and is not acyclic")]
    DividedPowers { generator: String, p: u32 },
    #[error("empty window {lo}..{hi}")]
    EmptyWindow { lo: i32, hi: i32 },
    #[error("window insufficient: {0}")]
    WindowInsufficient(String),
    #[error("products and topological complexity invariants need a commutative (Sullivan) model")]
    TensorProducts,
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

/// A closed range of cohomological degrees.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub lo: i32,
    pub hi: i32,
}

impl Window {
    pub fn new(lo: i32, hi: i32) -> Result<Self, ExtError> {
        if lo > hi {
            return Err(ExtError::EmptyWindow { lo, hi });
        }
        Ok(Window { lo, hi })
    }

    /// Parses `lo..hi` (inclusive).
    pub fn parse(text: &str) -> Option<Self> {
        let (a, b) = text.trim().split_once("..")?;
        let lo = a.trim().parse().ok()?;
        let hi = b.trim().parse().ok()?;
        Window::new(lo, hi).ok()
    }

    pub fn degrees(self) -> impl Iterator<Item = i32> {
        self.lo..=self.hi
    }

    pub fn contains(self, k: i32) -> bool {
        self.lo <= k && k <= self.hi
    }

    pub fn hull(self, other: Window) -> Window {
        Window { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    /// `[−fd_guess, 2·fd_guess]` with `fd_guess` the sum of generator degrees.
    pub fn default_for(pres: &Presentation) -> Window {
        let g = fd_guess(pres);
        Window { lo: -g, hi: 2 * g }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

pub fn fd_guess(pres: &Presentation) -> i32 {
    pres.generators().iter().map(|g| g.degree).sum()
}

fn max_gen_degree(pres: &Presentation) -> i32 {
    pres.generators().iter().map(|g| g.degree).max().unwrap_or(0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stability {
    /// Tensor flavor: the closure is finite, nothing is truncated.
    Exact,
    /// Same dimension at weight bounds `W` and `W + 2`.
    Stable { margin: u32 },
    Unstable { margin: u32, first: usize, second: usize },
}

impl Stability {
    pub fn certified(self) -> bool {
        !matches!(self, Stability::Unstable { .. })
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Stability::Exact => "exact",
            Stability::Stable { .. } => "stable",
            Stability::Unstable { .. } => "unstable",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExtOptions {
    pub window: Window,
    /// Extra filtration weight beyond the target range (commutative only).
    pub margin: Option<u32>,
    /// `B` in the Gorenstein certificate: the window must cover `[−B, B]`.
    pub fd_bound: Option<i32>,
    pub lift: LiftChoice,
    pub stability_check: bool,
}

impl ExtOptions {
    pub fn new(window: Window) -> Self {
        ExtOptions { window, margin: None, fd_bound: None, lift: LiftChoice::Solver, stability_check: true }
    }

    pub fn default_for(pres: &Presentation) -> Self {
        ExtOptions::new(Window::default_for(pres))
    }
}

#[derive(Clone, Debug)]
pub struct ExtGroup {
    pub degree: i32,
    pub dim: usize,
    pub reps: Vec<HomElement>,
    pub stability: Stability,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Gorenstein {
    Yes,
    No,
    Unknown(String),
}

impl Gorenstein {
    pub fn keyword(&self) -> &'static str {
        match self {
            Gorenstein::Yes => "yes",
            Gorenstein::No => "no",
            Gorenstein::Unknown(_) => "unknown",
        }
    }
}

/// Top degree with nonzero Ext in the window; `value = None` when every
/// degree of the window vanishes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FormalDimension {
    pub value: Option<i32>,
    pub exact: bool,
}

/// Value of a class product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProductEntry {
    Coords(SparseVec),
    OutOfWindow,
}

/// Outcome of one family of axiom checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomCheck {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl AxiomCheck {
    fn new() -> Self {
        AxiomCheck { checked: 0, failures: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnitStatus {
    /// `ε̃` is a cocycle; its class coordinates in degree 0.
    Class(SparseVec),
    /// `ε̃` is not a cocycle (`D ε̃ ≠ 0`), so it names no class.
    NotACocycle,
    NotApplicable,
}

#[derive(Clone, Debug)]
pub struct ProductTable {
    pub lift: LiftChoice,
    /// `(deg a, index a, deg b, index b) → a·b`.
    pub entries: BTreeMap<(i32, usize, i32, usize), ProductEntry>,
    pub associativity: AxiomCheck,
    pub commutativity: AxiomCheck,
    pub unit_law: AxiomCheck,
    pub ev_morphism: AxiomCheck,
    pub unit: UnitStatus,
}

/// Result of an Ext computation; cheap to query, immutable once built.
#[derive(Debug)]
pub struct ExtAlgebra {
    pub pres: Arc<Presentation>,
    pub window: Window,
    pub weight_bound: Option<u32>,
    pub margin: Option<u32>,
    pub fd_bound: i32,
    pub groups: BTreeMap<i32, ExtGroup>,
    /// `ev` of each representative, as coordinates in `H(A)` of its degree.
    pub ev: BTreeMap<i32, Vec<SparseVec>>,
    pub base_cohomology: BTreeMap<i32, usize>,
    pub products: Option<ProductTable>,
    hom: Arc<HomComplex>,
    homology: BTreeMap<i32, Homology>,
    base_homology: BTreeMap<i32, Homology>,
    closure: Option<SullivanClosure>,
}

fn base_differential(a: &Presentation, n: i32) -> SparseMatrix {
    let src = a.basis(n);
    let cols = par_map(&src.monos, |m| a.coords(&a.d_mono(m), n + 1));
    SparseMatrix::from_columns(a.field(), a.dim(n + 1), cols)
}

/// Cohomology of the base algebra at internal degree `n`.
pub fn base_cohomology(a: &Presentation, n: i32) -> Result<Homology, LinalgError> {
    Homology::compute(a.field(), &base_differential(a, n - 1), &base_differential(a, n))
}

fn check_characteristic(pres: &Presentation) -> Result<(), ExtError> {
    if pres.flavor() == Flavor::Commutative {
        if let FieldSpec::Prime(p) = pres.field() {
            if let Some(i) = (0..pres.ngens()).find(|&i| pres.gen_odd(i)) {
                return Err(ExtError::DividedPowers { generator: pres.generators()[i].name.clone(), p });
            }
        }
    }
    Ok(())
}

/// Filtration weight used for a window and margin, given the bound `fd` on
/// the formal dimension (`fd_guess` unless the caller supplies one).
pub fn weight_bound(fd: i32, window: Window, margin: u32) -> u32 {
    let d = fd.max(window.hi) + (-window.lo).max(0);
    d.max(0) as u32 + margin
}

pub fn default_margin(pres: &Presentation) -> u32 {
    max_gen_degree(pres) as u32 + 1
}

/// Per-degree homology of a Hom complex over the window.
fn hom_homology(hom: &HomComplex, window: Window) -> Result<BTreeMap<i32, Homology>, ExtError> {
    let ks: Vec<i32> = (window.lo - 1..=window.hi).collect();
    let ds: Vec<SparseMatrix> = par_map(&ks, |&k| hom.differential(k));
    let field = hom.field();
    let degrees: Vec<i32> = window.degrees().collect();
    let hs = par_map(&degrees, |&k| {
        let i = (k - window.lo) as usize;
        Homology::compute(field, &ds[i], &ds[i + 1])
    });
    let mut out = BTreeMap::new();
    for (k, h) in degrees.into_iter().zip(hs) {
        let h = h.map_err(|e| match e {
            LinalgError::NotAComplex { .. } => ExtError::InvariantViolation(format!("D² ≠ 0 at degree {k}")),
            e => e.into(),
        })?;
        out.insert(k, h);
    }
    Ok(out)
}

/// Dimensions, representatives and stability flags of Ext over the window.
pub fn ext_groups(pres: Arc<Presentation>, opts: &ExtOptions) -> Result<ExtAlgebra, ExtError> {
    check_characteristic(&pres)?;
    let window = opts.window;
    let fd_bound = opts.fd_bound.unwrap_or_else(|| fd_guess(&pres));
    let (hom, closure, bound, margin, check_dims) = match pres.flavor() {
        Flavor::Tensor => {
            let c = ah_acyclic_closure(pres.clone())?;
            (Arc::new(HomComplex::new(Arc::new(c.module))), None, None, None, None)
        }
        Flavor::Commutative => {
            let c = sullivan_acyclic_closure(pres.clone())?;
            let margin = opts.margin.unwrap_or_else(|| default_margin(&pres));
            let w = weight_bound(fd_bound, window, margin);
            let hom = Arc::new(HomComplex::new(Arc::new(c.truncate(w))));
            let check = if opts.stability_check {
                let h2 = HomComplex::new(Arc::new(c.truncate(w + 2)));
                let hs = hom_homology(&h2, window)?;
                Some(hs.into_iter().map(|(k, h)| (k, h.dim)).collect::<BTreeMap<_, _>>())
            } else {
                None
            };
            (hom, Some(c), Some(w), Some(margin), check)
        }
    };
    let homology = hom_homology(&hom, window)?;
    let mut groups = BTreeMap::new();
    for (&k, h) in &homology {
        let stability = match (&check_dims, margin) {
            (None, None) => Stability::Exact,
            (None, Some(m)) => Stability::Unstable { margin: m, first: h.dim, second: h.dim },
            (Some(c), m) => {
                let m = m.unwrap_or(0);
                if c[&k] == h.dim {
                    Stability::Stable { margin: m }
                } else {
                    Stability::Unstable { margin: m, first: h.dim, second: c[&k] }
                }
            }
        };
        let reps = h.reps.iter().map(|v| hom.element(k, v)).collect();
        groups.insert(k, ExtGroup { degree: k, dim: h.dim, reps, stability });
    }
    let base = &pres;
    let degrees: Vec<i32> = window.degrees().collect();
    let bh = par_map(&degrees, |&k| base_cohomology(base, k));
    let mut base_homology = BTreeMap::new();
    for (k, h) in degrees.into_iter().zip(bh) {
        base_homology.insert(k, h?);
    }
    let mut ev = BTreeMap::new();
    for (k, g) in &groups {
        let bh = &base_homology[k];
        let imgs = g
            .reps
            .iter()
            .map(|f| {
                let v = pres.coords(f.at_one(), *k);
                bh.coordinates(&v).ok_or_else(|| ExtError::InvariantViolation(format!("f(1) is not a cocycle in degree {k}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        ev.insert(*k, imgs);
    }
    Ok(ExtAlgebra {
        pres,
        window,
        weight_bound: bound,
        margin,
        fd_bound,
        groups,
        ev,
        base_cohomology: base_homology.iter().map(|(k, h)| (*k, h.dim)).collect(),
        products: None,
        hom,
        homology,
        base_homology,
        closure,
    })
}

/// Ext with the full product table and axiom checks (commutative models).
pub fn ext_algebra_table(pres: Arc<Presentation>, opts: &ExtOptions) -> Result<ExtAlgebra, ExtError> {
    let mut ext = ext_groups(pres, opts)?;
    if ext.pres.flavor() == Flavor::Commutative {
        let engine = ProductEngine::new(&ext, opts.lift)?;
        ext.products = Some(engine.table(&ext)?);
    }
    Ok(ext)
}

impl ExtAlgebra {
    pub fn flavor(&self) -> Flavor {
        self.pres.flavor()
    }

    pub fn field(&self) -> FieldSpec {
        self.pres.field()
    }

    pub fn dim(&self, k: i32) -> Option<usize> {
        self.groups.get(&k).map(|g| g.dim)
    }

    pub fn dims(&self) -> BTreeMap<i32, usize> {
        self.groups.iter().map(|(k, g)| (*k, g.dim)).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.groups.values().map(|g| g.dim).sum()
    }

    pub fn hom(&self) -> &HomComplex {
        &self.hom
    }

    /// Class coordinates of a cocycle, `None` outside the window or for a
    /// non-cocycle.
    pub fn class_of(&self, f: &HomElement) -> Option<SparseVec> {
        self.homology.get(&f.degree)?.coordinates(&self.hom.coords(f))
    }

    /// The cocycle `Σ c_i·rep_i` of degree `k`.
    pub fn element_of(&self, k: i32, coords: &SparseVec) -> HomElement {
        let n = self.hom.semibasis_len();
        let mut out = HomElement::zero(k, n);
        if let Some(g) = self.groups.get(&k) {
            for (i, c) in coords.iter() {
                for (j, v) in g.reps[*i].values.iter().enumerate() {
                    out.values[j].axpy(c, v);
                }
            }
        }
        out
    }

    /// `ev` of a class given by coordinates: coordinates of `[f(1)]` in `H(A)`.
    pub fn ev_of(&self, k: i32, coords: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        if let Some(imgs) = self.ev.get(&k) {
            for (i, c) in coords.iter() {
                out.axpy(c, &imgs[*i]);
            }
        }
        out
    }

    /// True when some class has nonzero `ev`.
    pub fn ev_nonzero(&self) -> bool {
        self.ev.values().flatten().any(|v| !v.is_zero())
    }

    /// Coordinates in `H^k(A)` of a base cocycle.
    pub fn base_class(&self, k: i32, p: &Poly) -> Option<SparseVec> {
        self.base_homology.get(&k)?.coordinates(&self.pres.coords(p, k))
    }

    pub fn gorenstein_test(&self) -> Gorenstein {
        let b = self.fd_bound;
        let certified: usize =
            self.groups.values().filter(|g| g.stability.certified()).map(|g| g.dim).sum();
        if certified >= 2 {
            return Gorenstein::No;
        }
        if let Some(g) = self.groups.values().find(|g| !g.stability.certified()) {
            return Gorenstein::Unknown(format!("degree {} is not stable under the weight margin", g.degree));
        }
        if self.window.lo > -b || self.window.hi < b {
            return Gorenstein::Unknown(format!("window {} does not cover [{}, {}]", self.window, -b, b));
        }
        match self.total_dim() {
            1 => Gorenstein::Yes,
            0 => Gorenstein::Unknown("no class found in the window".to_string()),
            _ => Gorenstein::No,
        }
    }

    pub fn formal_dimension(&self) -> FormalDimension {
        let value = self.groups.values().rev().find(|g| g.dim > 0).map(|g| g.degree);
        let exact = match self.flavor() {
            // Hom^k = 0 for k > max|v| + 1.
            Flavor::Tensor => {
                value.is_some() && self.window.hi >= max_gen_degree(&self.pres) + 1
            }
            Flavor::Commutative => self.gorenstein_test() == Gorenstein::Yes,
        };
        FormalDimension { value, exact }
    }

    /// Product of two cocycles (commutative models only).
    pub fn ext_product(&self, f: &HomElement, g: &HomElement, lift: LiftChoice) -> Result<HomElement, ExtError> {
        if self.flavor() != Flavor::Commutative {
            return Err(ExtError::TensorProducts);
        }
        Ok(ProductEngine::new(self, lift)?.product(&self.pres, f, g))
    }
}

/// `α` on each semibasis monomial, split as `(b, m1, m2, c)` with
/// `α(m) = Σ c·b·m1·m2`, `m1`, `m2` indices into the semibasis.
struct ProductEngine {
    lift: LiftChoice,
    split: Vec<Vec<(Mono, usize, usize, Scalar, bool)>>,
}

impl ProductEngine {
    fn new(ext: &ExtAlgebra, lift: LiftChoice) -> Result<Self, ExtError> {
        let p = ext.closure.as_ref().ok_or(ExtError::TensorProducts)?;
        let bound = ext.weight_bound.expect("commutative Ext has a weight bound");
        let q = tensor_square_resolution(p)?;
        let alpha = lift_comparison(p, &q, lift)?;
        alpha.check_chain_map().map_err(ExtError::InvariantViolation)?;
        let k = p.nbase();
        let fibers = p.fiber_monomials(bound);
        let index: HashMap<Mono, usize> = fibers.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let nt = p.total.ngens();
        let gens = &ext.hom.module.gens;
        let split = par_map(&fibers, |f| -> Result<Vec<(Mono, usize, usize, Scalar, bool)>, ExtError> {
            let mut m: Mono = smallvec::SmallVec::from_elem(0, nt);
            m[k..].copy_from_slice(f);
            let img = alpha.apply(&Poly::monomial(m, p.total.field().one()));
            let mut out = Vec::new();
            for (t, c) in img.terms() {
                let b: Mono = t[..k].iter().copied().collect();
                let m1: Mono = t[k..2 * k].iter().copied().collect();
                let m2: Mono = t[2 * k..].iter().copied().collect();
                let (i1, i2) = match (index.get(&m1), index.get(&m2)) {
                    (Some(a), Some(b)) => (*a, *b),
                    _ => {
                        return Err(ExtError::WindowInsufficient(
                            "the lift leaves the weight truncation; increase the margin".to_string(),
                        ))
                    }
                };
                let m1odd = gens[i1].degree.rem_euclid(2) == 1;
                out.push((b, i1, i2, c.clone(), m1odd));
            }
            Ok(out)
        });
        Ok(ProductEngine { lift, split: split.into_iter().collect::<Result<_, _>>()? })
    }

    /// `(f·g)(m) = Σ c·(−1)^{|g|(|b|+|m1|)+|f||b|} b·f(m1)·g(m2)`.
    fn product(&self, a: &Presentation, f: &HomElement, g: &HomElement) -> HomElement {
        let fodd = f.degree.rem_euclid(2) == 1;
        let godd = g.degree.rem_euclid(2) == 1;
        let values = par_map(&self.split, |terms| {
            let mut v = Poly::zero();
            for (b, i1, i2, c, m1odd) in terms {
                let x = &f.values[*i1];
                let y = &g.values[*i2];
                if x.is_zero() || y.is_zero() {
                    continue;
                }
                let bodd = a.mono_odd(b);
                let neg = (godd && (bodd ^ *m1odd)) ^ (fodd && bodd);
                let bp = Poly::monomial(b.clone(), c.clone().signed(neg));
                v = v.add(&a.mul(&a.mul(&bp, x), y));
            }
            v
        });
        HomElement { degree: f.degree + g.degree, values }
    }

    fn class_product(&self, ext: &ExtAlgebra, x: (i32, &SparseVec), y: (i32, &SparseVec)) -> Result<ProductEntry, ExtError> {
        let deg = x.0 + y.0;
        if !ext.window.contains(deg) {
            return Ok(ProductEntry::OutOfWindow);
        }
        let f = ext.element_of(x.0, x.1);
        let g = ext.element_of(y.0, y.1);
        let h = self.product(&ext.pres, &f, &g);
        ext.class_of(&h)
            .map(ProductEntry::Coords)
            .ok_or_else(|| ExtError::InvariantViolation(format!("product in degree {deg} is not a cocycle")))
    }

    fn table(&self, ext: &ExtAlgebra) -> Result<ProductTable, ExtError> {
        let field = ext.field();
        let classes: Vec<(i32, usize)> =
            ext.groups.values().flat_map(|g| (0..g.dim).map(move |i| (g.degree, i))).collect();
        let unit_vec = |i: usize| SparseVec::unit(i, field);
        let mut entries = BTreeMap::new();
        for &(da, ia) in &classes {
            for &(db, ib) in &classes {
                let e = self.class_product(ext, (da, &unit_vec(ia)), (db, &unit_vec(ib)))?;
                entries.insert((da, ia, db, ib), e);
            }
        }
        let mut commutativity = AxiomCheck::new();
        for &(da, ia) in &classes {
            for &(db, ib) in &classes {
                let ab = &entries[&(da, ia, db, ib)];
                let ba = &entries[&(db, ib, da, ia)];
                let ok = match (ab, ba) {
                    (ProductEntry::Coords(u), ProductEntry::Coords(v)) => {
                        let neg = (da * db).rem_euclid(2) == 1;
                        *u == v.scaled(&field.one().signed(neg))
                    }
                    (ProductEntry::OutOfWindow, ProductEntry::OutOfWindow) => continue,
                    _ => false,
                };
                commutativity.record(ok, || format!("a·b ≠ ±b·a for ({da},{ia}), ({db},{ib})"));
            }
        }
        let mut associativity = AxiomCheck::new();
        for &(da, ia) in &classes {
            for &(db, ib) in &classes {
                for &(dc, ic) in &classes {
                    let (ProductEntry::Coords(ab), ProductEntry::Coords(bc)) =
                        (&entries[&(da, ia, db, ib)], &entries[&(db, ib, dc, ic)])
                    else {
                        continue;
                    };
                    if !ext.window.contains(da + db + dc) {
                        continue;
                    }
                    let left = self.class_product(ext, (da + db, ab), (dc, &unit_vec(ic)))?;
                    let right = self.class_product(ext, (da, &unit_vec(ia)), (db + dc, bc))?;
                    associativity.record(left == right, || {
                        format!("(ab)c ≠ a(bc) for ({da},{ia}), ({db},{ib}), ({dc},{ic})")
                    });
                }
            }
        }
        let mut ev_morphism = AxiomCheck::new();
        for (&(da, ia, db, ib), e) in &entries {
            let ProductEntry::Coords(v) = e else { continue };
            let fa = &ext.groups[&da].reps[ia];
            let fb = &ext.groups[&db].reps[ib];
            let lhs = ext.ev_of(da + db, v);
            let prod = ext.pres.mul(fa.at_one(), fb.at_one());
            let rhs = ext.base_class(da + db, &prod);
            ev_morphism.record(rhs.as_ref() == Some(&lhs), || {
                format!("ev(a·b) ≠ ev(a)·ev(b) for ({da},{ia}), ({db},{ib})")
            });
        }
        // ε̃: 1 ↦ 1, every other semibasis element ↦ 0.
        let mut eps = HomElement::zero(0, ext.hom.semibasis_len());
        eps.values[0] = ext.pres.one();
        let mut unit_law = AxiomCheck::new();
        let unit = if !ext.window.contains(0) {
            unit_law.record(false, || "degree 0 is outside the window".to_string());
            UnitStatus::NotACocycle
        } else if !ext.hom.apply_d(&eps).is_zero() {
            unit_law.record(false, || "ε̃ is not a cocycle, so it represents no unit class".to_string());
            UnitStatus::NotACocycle
        } else {
            let u = ext.class_of(&eps).expect("cocycle in the window has coordinates");
            for &(d, i) in &classes {
                let left = self.class_product(ext, (0, &u), (d, &unit_vec(i)))?;
                let right = self.class_product(ext, (d, &unit_vec(i)), (0, &u))?;
                let expected = ProductEntry::Coords(unit_vec(i));
                unit_law.record(left == expected && right == expected, || format!("unit law fails on ({d},{i})"));
            }
            UnitStatus::Class(u)
        };
        Ok(ProductTable { lift: self.lift, entries, associativity, commutativity, unit_law, ev_morphism, unit })
    }
}
