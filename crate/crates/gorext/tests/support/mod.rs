//! Checks shared by the library's integration tests and the acceptance
//! suite. Each returns `Err(reason)` rather than panicking so callers can
//! report a verdict per criterion.
#![allow(dead_code)]

pub mod bar;

use std::sync::Arc;

use gorext::algebra::{Flavor, Generator, Poly, Presentation, Violation};
use gorext::ext::{default_margin, ext_algebra_table, ext_groups, fd_guess, ExtOptions, UnitStatus, Window};
use gorext::field::FieldSpec;
use gorext::hom::HomComplex;
use gorext::models::{builtin, with_contractible_pair};
use gorext::parse::print_model;
use gorext::resolution::{ah_acyclic_closure, sullivan_acyclic_closure, SemiFreeModule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FUZZ_SEED: u64 = 0x5eed;

/// Random presentation with at most four generators of degree at most six.
/// Differentials are random; any generator whose `d²` fails is repaired by
/// setting its differential to zero, which always terminates.
fn fuzzed_once(rng: &mut ChaCha8Rng) -> Presentation {
    let flavor = if rng.gen_bool(0.5) { Flavor::Tensor } else { Flavor::Commutative };
    let field = match rng.gen_range(0..3) {
        0 => FieldSpec::Rationals,
        1 => FieldSpec::Prime(3),
        _ => FieldSpec::Prime(5),
    };
    let min = if flavor == Flavor::Tensor { 1 } else { 2 };
    let n = rng.gen_range(1..=4);
    let mut degrees: Vec<i32> = (0..n).map(|i| rng.gen_range(min..=if i == 0 { min + 1 } else { 6 })).collect();
    degrees.sort();
    let gens: Vec<Generator> = degrees.iter().enumerate().map(|(i, &d)| Generator::new(format!("g{i}"), d)).collect();
    let free = Presentation::new(field, flavor, gens.clone(), vec![Poly::zero(); n]).unwrap();
    let mut diff: Vec<Poly> = (0..n)
        .map(|i| {
            let target = free.flavor().internal(degrees[i]) + 1;
            let mut p = Poly::zero();
            for m in free.basis_of_degree(target) {
                if free.word_length(&m) == 1 && rng.gen_bool(0.7) {
                    continue;
                }
                if rng.gen_bool(0.6) {
                    p.add_term(m, field.from_i64(rng.gen_range(1..=2)).signed(rng.gen_bool(0.5)));
                }
            }
            p
        })
        .collect();
    loop {
        let p = free.with_differential(diff.clone()).unwrap();
        match p.check_differential(None) {
            Ok(()) => return p,
            Err(Violation::SquareNonzero { generator, .. }) | Err(Violation::Inhomogeneous { generator, .. })
            | Err(Violation::ConstantTerm { generator }) => {
                let i = p.gen_index(&generator).unwrap();
                diff[i] = Poly::zero();
            }
        }
    }
}

/// Up to five draws, preferring one with `d ≠ 0`.
pub fn fuzzed(rng: &mut ChaCha8Rng) -> Presentation {
    let mut p = fuzzed_once(rng);
    for _ in 0..4 {
        if has_differential(&p) {
            break;
        }
        p = fuzzed_once(rng);
    }
    p
}

pub fn has_differential(p: &Presentation) -> bool {
    p.differential().images.iter().any(|d| !d.is_zero())
}

fn hom_d_squared(module: SemiFreeModule, lo: i32, hi: i32) -> Result<(), i32> {
    let h = HomComplex::new(Arc::new(module));
    for k in lo..hi {
        if !h.differential(k + 1).compose(&h.differential(k)).unwrap().is_zero() {
            return Err(k);
        }
    }
    Ok(())
}

/// `d² = 0` on the model, `δ² = 0` on its closure and `D² = 0` on Hom.
pub fn check_squares(p: &Presentation) -> Result<(), String> {
    let text = print_model(p);
    p.check_differential(None).map_err(|v| format!("d² ≠ 0 ({v:?}) for\n{text}"))?;
    let pres = Arc::new(p.clone());
    let (module, lo, hi) = match p.flavor() {
        Flavor::Tensor => (ah_acyclic_closure(pres).map_err(|e| e.to_string())?.module, -8, 2),
        Flavor::Commutative => (sullivan_acyclic_closure(pres).map_err(|e| e.to_string())?.truncate(8), -6, 6),
    };
    module.check_delta_squared().map_err(|e| format!("δ² ≠ 0 ({e:?}) for\n{text}"))?;
    hom_d_squared(module, lo, hi).map_err(|k| format!("D² ≠ 0 at {k} for\n{text}"))
}

/// Runs `check_squares` on `count` fuzzed presentations; returns how many
/// had a nonzero differential.
pub fn fuzz_squares(count: usize) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(FUZZ_SEED);
    let mut nonzero = 0;
    for _ in 0..count {
        let p = fuzzed(&mut rng);
        nonzero += usize::from(has_differential(&p));
        check_squares(&p)?;
    }
    Ok(nonzero)
}

/// Ext of `name` is unchanged by adding a contractible pair in each degree.
/// The pair adds nothing to the formal dimension, only to the sum of
/// generator degrees, so the enlarged model is truncated like the original.
pub fn check_contractible(name: &str, field: FieldSpec, window: Window, degrees: &[i32]) -> Result<(), String> {
    let p = builtin(name, field).map_err(|e| e.to_string())?;
    let dims = ext_groups(Arc::new(p.clone()), &ExtOptions::new(window)).map_err(|e| e.to_string())?.dims();
    for &degree in degrees {
        let q = with_contractible_pair(&p, degree).map_err(|e| e.to_string())?;
        let mut opts = ExtOptions::new(window);
        opts.fd_bound = Some(fd_guess(&p));
        opts.margin = Some(default_margin(&p));
        let e = ext_groups(Arc::new(q), &opts).map_err(|e| e.to_string())?;
        if !e.groups.values().all(|g| g.stability.certified()) {
            return Err(format!("{name} + pair({degree}): not certified"));
        }
        if e.dims() != dims {
            return Err(format!("{name} + pair({degree}): {:?} vs {:?}", e.dims(), dims));
        }
    }
    Ok(())
}

/// Outcome of the product axioms on one commutative model.
#[derive(Debug)]
pub struct Axioms {
    pub associativity: Result<(), String>,
    pub commutativity: Result<(), String>,
    pub ev_morphism: Result<(), String>,
    /// The unit law as stated: `ε̃` is a cocycle whose class is a two-sided unit.
    pub unit_law: Result<(), String>,
}

pub fn product_axioms(p: Arc<Presentation>) -> Result<Axioms, String> {
    let e = ext_algebra_table(p.clone(), &ExtOptions::default_for(&p)).map_err(|e| e.to_string())?;
    let t = e.products.as_ref().ok_or("no product table")?;
    let verdict = |c: &gorext::ext::AxiomCheck| {
        if c.passed() {
            Ok(())
        } else {
            Err(c.failures.join("; "))
        }
    };
    let unit_law = match &t.unit {
        UnitStatus::Class(_) => verdict(&t.unit_law),
        UnitStatus::NotACocycle => Err("ε̃ is not a cocycle".into()),
        UnitStatus::NotApplicable => Err("unit not applicable".into()),
    };
    Ok(Axioms {
        associativity: verdict(&t.associativity),
        commutativity: verdict(&t.commutativity),
        ev_morphism: verdict(&t.ev_morphism),
        unit_law,
    })
}
