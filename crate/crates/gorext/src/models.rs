//! Built-in model families. Every builder emits model-language text and
//! parses it, so built-ins get the same validation and canonical generator
//! order as user files.

use std::fmt::Write as _;

use thiserror::Error;

use crate::algebra::{Flavor, Generator, Mono, Poly, Presentation};
use crate::field::FieldSpec;
use crate::parse::{parse_model, print_model, ParseError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("unknown built-in model `{0}`; see `models list`")]
    Unknown(String),
    #[error("bad parameters for `{name}`: {reason}")]
    Params { name: String, reason: String },
    #[error("product needs commutative factors")]
    FlavorMismatch,
    #[error("generated model failed to parse: {0}")]
    Parse(#[from] ParseError),
}

fn params_err(name: &str, reason: impl Into<String>) -> ModelError {
    ModelError::Params { name: name.to_string(), reason: reason.into() }
}

fn header(field: FieldSpec, flavor: Flavor) -> String {
    let f = match field {
        FieldSpec::Rationals => "Q".to_string(),
        FieldSpec::Prime(p) => format!("F{p}"),
    };
    format!("field {f}\nflavor {}\n", flavor.keyword())
}

/// The ground field, with no generators.
pub fn point_model(field: FieldSpec, flavor: Flavor) -> Presentation {
    Presentation::point(field, flavor)
}

/// Sullivan: `Λ(x1)` for odd `n`, `Λ(x1, x2)` with `d x2 = x1²` for even
/// `n`. Tensor: `T(x1)`, `|x1| = n − 1`.
pub fn sphere_model(n: i32, flavor: Flavor, field: FieldSpec) -> Result<Presentation, ModelError> {
    if n < 2 {
        return Err(params_err("sphere", format!("dimension {n} < 2")));
    }
    let mut s = header(field, flavor);
    match flavor {
        Flavor::Commutative if n % 2 == 1 => writeln!(s, "gen x1 {n}").unwrap(),
        Flavor::Commutative => {
            writeln!(s, "gen x1 {n}\ngen x2 {}\nd x2 = x1^2", 2 * n - 1).unwrap();
        }
        Flavor::Tensor => writeln!(s, "gen x1 {}", n - 1).unwrap(),
    }
    Ok(parse_model(&s)?)
}

/// `T(a, a')`, `|a| = q − 1`, `|a'| = q`, `da = 0`, `da' = −r·a`.
pub fn two_cell_model(q: i32, r: i64, field: FieldSpec) -> Result<Presentation, ModelError> {
    if q < 2 {
        return Err(params_err("two_cell", format!("q = {q} < 2")));
    }
    let mut s = header(field, Flavor::Tensor);
    writeln!(s, "gen a {}\ngen a' {q}", q - 1).unwrap();
    if r != 0 {
        writeln!(s, "d a' = {}*a", -r).unwrap();
    }
    Ok(parse_model(&s)?)
}

/// `T(V)` with `rank` generators in each listed degree and `d = 0`.
pub fn suspension_model(betti: &[(i32, usize)], field: FieldSpec) -> Result<Presentation, ModelError> {
    let mut betti = betti.to_vec();
    betti.sort();
    let mut s = header(field, Flavor::Tensor);
    let mut i = 0;
    for (deg, rank) in betti {
        if deg < 1 || rank < 1 {
            return Err(params_err("suspension", format!("degree {deg}, rank {rank}")));
        }
        for _ in 0..rank {
            i += 1;
            writeln!(s, "gen x{i} {deg}").unwrap();
        }
    }
    Ok(parse_model(&s)?)
}

/// Renames generators to `x1, x2, …` in (degree, original index) order.
fn renamed(field: FieldSpec, flavor: Flavor, gens: Vec<Generator>, diff: Vec<Poly>) -> Result<Presentation, ModelError> {
    let mut order: Vec<usize> = (0..gens.len()).collect();
    order.sort_by_key(|&i| (gens[i].degree, i));
    let mut pos = vec![0; gens.len()];
    for (new, &old) in order.iter().enumerate() {
        pos[old] = new;
    }
    // Tensor-flavor monomials are words; commutative ones exponent vectors.
    let remap = |m: &Mono| -> Mono {
        match flavor {
            Flavor::Commutative => {
                let mut e: Mono = smallvec::SmallVec::from_elem(0, gens.len());
                for (old, &x) in m.iter().enumerate() {
                    e[pos[old]] = x;
                }
                e
            }
            Flavor::Tensor => m.iter().map(|&l| pos[l as usize] as u16).collect(),
        }
    };
    let mut new_gens = Vec::new();
    let mut new_diff = Vec::new();
    for (new, &old) in order.iter().enumerate() {
        new_gens.push(Generator::new(format!("x{}", new + 1), gens[old].degree));
        let p: Poly = diff[old].terms().map(|(m, c)| (remap(m), c.clone())).collect();
        new_diff.push(p);
    }
    // Each differential involves one factor only, whose generators keep their
    // relative order; moving exponents therefore changes no Koszul sign.
    let pres = Presentation::new(field, flavor, new_gens, new_diff).expect("renaming keeps shapes");
    Ok(parse_model(&print_model(&pres))?)
}

/// Disjoint union of generators with the componentwise differential.
pub fn product_model(p1: &Presentation, p2: &Presentation) -> Result<Presentation, ModelError> {
    if p1.flavor() != Flavor::Commutative || p2.flavor() != Flavor::Commutative || p1.field() != p2.field() {
        return Err(ModelError::FlavorMismatch);
    }
    let (k1, k2) = (p1.ngens(), p2.ngens());
    let widen = |p: &Poly, offset: usize| -> Poly {
        p.terms()
            .map(|(m, c)| {
                let mut e: Mono = smallvec::SmallVec::from_elem(0, k1 + k2);
                e[offset..offset + m.len()].copy_from_slice(m);
                (e, c.clone())
            })
            .collect()
    };
    let mut gens: Vec<Generator> = p1.generators().to_vec();
    gens.extend(p2.generators().iter().cloned());
    let mut diff: Vec<Poly> = p1.differential().images.iter().map(|p| widen(p, 0)).collect();
    diff.extend(p2.differential().images.iter().map(|p| widen(p, k1)));
    renamed(p1.field(), Flavor::Commutative, gens, diff)
}

/// Appends a contractible pair `u, w` with `du = w`. For a commutative model
/// `|u| = degree`, `|w| = degree + 1`; for a tensor model `|u| = degree + 1`,
/// `|w| = degree`, as `d` lowers degree there.
pub fn with_contractible_pair(pres: &Presentation, degree: i32) -> Result<Presentation, ModelError> {
    let mut text = print_model(pres);
    let taken = |n: &str| pres.gen_index(n).is_some();
    let mut suffix = String::new();
    while taken(&format!("u{suffix}")) || taken(&format!("w{suffix}")) {
        suffix.push('\'');
    }
    let (du, dw) = match pres.flavor() {
        Flavor::Commutative => (degree, degree + 1),
        Flavor::Tensor => (degree + 1, degree),
    };
    // d lines must follow every gen line.
    let (gens, diffs): (Vec<&str>, Vec<&str>) = text.lines().partition(|l| !l.starts_with("d "));
    let mut out = gens.join("\n");
    writeln!(out, "\ngen u{suffix} {du}\ngen w{suffix} {dw}").unwrap();
    for d in diffs {
        writeln!(out, "{d}").unwrap();
    }
    writeln!(out, "d u{suffix} = w{suffix}").unwrap();
    text = out;
    Ok(parse_model(&text)?)
}

/// Name and one-line description of each built-in family.
pub fn list() -> Vec<(&'static str, &'static str)> {
    vec![
        ("point[:flavor]", "the ground field; flavor sullivan (default) or ah"),
        ("sphere:n[,flavor]", "S^n; Sullivan Λ(x) or Λ(x,y) with dy = x², or Adams–Hilton T(a)"),
        ("two_cell:q,r", "Adams–Hilton T(a, a'), |a| = q−1, |a'| = q, da' = −r·a"),
        ("suspension:d[xr],...", "Adams–Hilton T(V), r generators in degree d, d = 0"),
        ("product:n1,n2,...", "Sullivan model of S^n1 × S^n2 × ..."),
    ]
}

fn flavor_word(name: &str, w: &str) -> Result<Flavor, ModelError> {
    match w {
        "sullivan" | "commutative" => Ok(Flavor::Commutative),
        "ah" | "adams-hilton" | "tensor" => Ok(Flavor::Tensor),
        _ => Err(params_err(name, format!("unknown flavor `{w}`"))),
    }
}

fn int<T: std::str::FromStr>(name: &str, s: &str) -> Result<T, ModelError> {
    s.trim().parse().map_err(|_| params_err(name, format!("`{s}` is not an integer")))
}

/// Builds a built-in from `name` or `name:p1,p2,…`.
pub fn builtin(spec: &str, field: FieldSpec) -> Result<Presentation, ModelError> {
    let (name, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let params: Vec<&str> = if rest.is_empty() { Vec::new() } else { rest.split(',').map(str::trim).collect() };
    match name {
        "point" => {
            let flavor = match params.as_slice() {
                [] => Flavor::Commutative,
                [f] => flavor_word(name, f)?,
                _ => return Err(params_err(name, "expected at most a flavor")),
            };
            Ok(point_model(field, flavor))
        }
        "sphere" => match params.as_slice() {
            [n] => sphere_model(int(name, n)?, Flavor::Commutative, field),
            [n, f] => sphere_model(int(name, n)?, flavor_word(name, f)?, field),
            _ => Err(params_err(name, "expected n[,flavor]")),
        },
        "two_cell" => match params.as_slice() {
            [q, r] => two_cell_model(int(name, q)?, int(name, r)?, field),
            _ => Err(params_err(name, "expected q,r")),
        },
        "suspension" => {
            let mut betti = Vec::new();
            for p in &params {
                let (d, r) = p.split_once('x').unwrap_or((p, "1"));
                betti.push((int(name, d)?, int(name, r)?));
            }
            suspension_model(&betti, field)
        }
        "product" => {
            if params.is_empty() {
                return Err(params_err(name, "expected at least one sphere dimension"));
            }
            let mut acc = point_model(field, Flavor::Commutative);
            for p in &params {
                acc = product_model(&acc, &sphere_model(int(name, p)?, Flavor::Commutative, field)?)?;
            }
            Ok(acc)
        }
        _ => Err(ModelError::Unknown(spec.to_string())),
    }
}

/// Fixed list of built-in instances used for whole-catalogue checks.
pub fn catalogue() -> Vec<(&'static str, FieldSpec)> {
    let q = FieldSpec::Rationals;
    let f3 = FieldSpec::Prime(3);
    vec![
        ("point", q),
        ("point:ah", q),
        ("sphere:2", q),
        ("sphere:3", q),
        ("sphere:4", q),
        ("sphere:2,ah", q),
        ("sphere:3,ah", q),
        ("sphere:3,ah", f3),
        ("two_cell:2,3", f3),
        ("two_cell:2,1", q),
        ("two_cell:3,2", q),
        ("suspension:1", q),
        ("suspension:1,2", q),
        ("product:3,3", q),
        ("product:2,3", q),
    ]
}
