//! The model-description language.
//!
//! ```text
//! format 1
//! field F 3
//! flavor adams-hilton
//! gen a 1
//! gen a' 2
//! d a' = -3*a
//! ```
//!
//! One statement per line, `#` starts a comment. Generators may be declared
//! in any order; they are stored sorted by (degree, name). Every generator
//! has at most one `d` line and defaults to `d = 0`.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::algebra::{Flavor, Generator, Mono, Poly, Presentation, Violation};
use crate::field::{FieldError, FieldSpec, Scalar};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownGenerator,
    Inhomogeneous,
    Parity,
    DuplicateGenerator,
    DuplicateDifferential,
    Field,
    Degree,
    NotDifferential,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.message)
    }
}

fn err(line: usize, col: usize, kind: ParseErrorKind, message: impl Into<String>) -> ParseError {
    ParseError { line, col, kind, message: message.into() }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
}

fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\'' || c == '′' || ('₀'..='₉').contains(&c)
}

/// Tokens with 1-based columns.
fn tokenize(text: &str, line: usize, col0: usize) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = col0 + i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' | '−' => Tok::Minus,
            '*' | '·' => Tok::Star,
            '^' => Tok::Caret,
            '/' => Tok::Slash,
            _ if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push((col, Tok::Int(s.parse().unwrap())));
                continue;
            }
            _ if is_name_start(c) => {
                let start = i;
                while i < chars.len() && is_name_char(chars[i]) {
                    i += 1;
                }
                out.push((col, Tok::Name(chars[start..i].iter().collect())));
                continue;
            }
            _ => return Err(err(line, col, ParseErrorKind::Syntax, format!("unexpected character `{c}`"))),
        };
        out.push((col, tok));
        i += 1;
    }
    Ok(out)
}

struct DiffLine {
    line: usize,
    name: String,
    name_col: usize,
    rhs: String,
    rhs_col: usize,
}

/// Parses a model document into a validated presentation.
pub fn parse_model(src: &str) -> Result<Presentation, ParseError> {
    let mut field: Option<(FieldSpec, usize)> = None;
    let mut flavor: Option<(Flavor, usize)> = None;
    let mut gens: Vec<(Generator, usize, usize)> = Vec::new();
    let mut diffs: Vec<DiffLine> = Vec::new();

    for (ln0, raw) in src.lines().enumerate() {
        let ln = ln0 + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let lead = content.chars().take_while(|c| c.is_whitespace()).count();
        let body: String = content.chars().skip(lead).collect();
        let kw: String = body.chars().take_while(|c| !c.is_whitespace() && *c != ':').collect();
        let after: String = body.chars().skip(kw.chars().count()).collect();
        let after_col = lead + kw.chars().count() + 1;
        let words: Vec<(usize, String)> = split_words(&after, after_col);
        match kw.as_str() {
            "format" => {
                let w: Vec<&str> = words.iter().map(|(_, w)| w.as_str()).filter(|w| *w != ":").collect();
                let v = w.first().map(|s| s.trim_start_matches(':'));
                if v != Some("1") || w.len() != 1 {
                    return Err(err(ln, after_col, ParseErrorKind::Syntax, "unsupported format version (expected 1)"));
                }
            }
            "field" => {
                if field.is_some() {
                    return Err(err(ln, lead + 1, ParseErrorKind::Field, "field declared twice"));
                }
                let text: String = words.iter().map(|(_, w)| w.as_str()).collect::<Vec<_>>().join(" ");
                let col = words.first().map_or(after_col, |w| w.0);
                let f = FieldSpec::parse(&text).map_err(|e| {
                    let msg = match e {
                        FieldError::NotPrime(p) => format!("non-prime field modulus {p}"),
                        FieldError::EvenCharacteristic => "even characteristic is not supported".to_string(),
                        other => other.to_string(),
                    };
                    err(ln, col, ParseErrorKind::Field, msg)
                })?;
                field = Some((f, ln));
            }
            "flavor" => {
                if flavor.is_some() {
                    return Err(err(ln, lead + 1, ParseErrorKind::Syntax, "flavor declared twice"));
                }
                let col = words.first().map_or(after_col, |w| w.0);
                let f = match words.iter().map(|(_, w)| w.as_str()).collect::<Vec<_>>().as_slice() {
                    ["sullivan"] => Flavor::Commutative,
                    ["adams-hilton"] => Flavor::Tensor,
                    _ => {
                        return Err(err(ln, col, ParseErrorKind::Syntax, "flavor must be `sullivan` or `adams-hilton`"))
                    }
                };
                flavor = Some((f, ln));
            }
            "gen" => {
                if words.len() != 2 {
                    return Err(err(ln, after_col, ParseErrorKind::Syntax, "expected `gen <name> <degree>`"));
                }
                let (ncol, name) = &words[0];
                if !name.chars().next().is_some_and(is_name_start) || !name.chars().all(is_name_char) {
                    return Err(err(ln, *ncol, ParseErrorKind::Syntax, format!("invalid generator name `{name}`")));
                }
                let (dcol, dtext) = &words[1];
                let degree: i32 = dtext
                    .parse()
                    .map_err(|_| err(ln, *dcol, ParseErrorKind::Syntax, format!("invalid degree `{dtext}`")))?;
                if gens.iter().any(|(g, _, _)| &g.name == name) {
                    return Err(err(ln, *ncol, ParseErrorKind::DuplicateGenerator, format!("duplicate generator `{name}`")));
                }
                gens.push((Generator::new(name.clone(), degree), ln, *dcol));
            }
            "d" => {
                let eq = after.find('=').ok_or_else(|| {
                    err(ln, after_col, ParseErrorKind::Syntax, "expected `d <name> = <expression>`")
                })?;
                let lhs = &after[..eq];
                let lhs_words = split_words(lhs, after_col);
                if lhs_words.len() != 1 {
                    return Err(err(ln, after_col, ParseErrorKind::Syntax, "expected a single generator name before `=`"));
                }
                let rhs_col = after_col + after[..eq].chars().count() + 1;
                diffs.push(DiffLine {
                    line: ln,
                    name: lhs_words[0].1.clone(),
                    name_col: lhs_words[0].0,
                    rhs: after[eq + 1..].to_string(),
                    rhs_col,
                });
            }
            _ => {
                return Err(err(ln, lead + 1, ParseErrorKind::Syntax, format!("unknown statement `{kw}`")));
            }
        }
    }

    let field = field.map_or(FieldSpec::Rationals, |f| f.0);
    let flavor = flavor.map_or(Flavor::Commutative, |f| f.0);
    let min_degree = match flavor {
        Flavor::Commutative => 2,
        Flavor::Tensor => 1,
    };
    for (g, ln, col) in &gens {
        if g.degree < min_degree {
            return Err(err(
                *ln,
                *col,
                ParseErrorKind::Degree,
                format!("generator `{}` has degree {}; {} generators need degree ≥ {min_degree}", g.name, g.degree, flavor.keyword()),
            ));
        }
    }
    let mut sorted: Vec<Generator> = gens.iter().map(|(g, _, _)| g.clone()).collect();
    sorted.sort_by(|a, b| (a.degree, &a.name).cmp(&(b.degree, &b.name)));
    let n = sorted.len();
    let skeleton = Presentation::new(field, flavor, sorted.clone(), vec![Poly::zero(); n])
        .map_err(|e| err(1, 1, ParseErrorKind::Syntax, e.to_string()))?;

    let mut images = vec![Poly::zero(); n];
    let mut seen = vec![false; n];
    let mut dline = vec![0usize; n];
    for dl in &diffs {
        let i = skeleton.gen_index(&dl.name).ok_or_else(|| {
            err(dl.line, dl.name_col, ParseErrorKind::UnknownGenerator, format!("unknown generator `{}`", dl.name))
        })?;
        if seen[i] {
            return Err(err(dl.line, dl.name_col, ParseErrorKind::DuplicateDifferential, format!("second `d` line for `{}`", dl.name)));
        }
        seen[i] = true;
        dline[i] = dl.line;
        let expected = skeleton.gen_degree(i) + 1;
        images[i] = parse_expr(&skeleton, &dl.rhs, dl.line, dl.rhs_col, expected)?;
    }
    let pres = skeleton
        .with_differential(images)
        .map_err(|e| err(1, 1, ParseErrorKind::Syntax, e.to_string()))?;
    match pres.check_differential(None) {
        Ok(()) => Ok(pres),
        Err(Violation::SquareNonzero { generator, residue }) => {
            let i = pres.gen_index(&generator).unwrap();
            Err(err(
                dline[i].max(1),
                1,
                ParseErrorKind::NotDifferential,
                format!("d∘d({generator}) = {} ≠ 0", pres.format_poly(&residue)),
            ))
        }
        Err(Violation::ConstantTerm { generator }) => {
            let i = pres.gen_index(&generator).unwrap();
            Err(err(dline[i].max(1), 1, ParseErrorKind::Inhomogeneous, format!("d({generator}) has a constant term")))
        }
        Err(Violation::Inhomogeneous { generator, expected, found }) => Err(err(
            1,
            1,
            ParseErrorKind::Inhomogeneous,
            format!("d({generator}) has degree {found}, expected {expected}"),
        )),
    }
}

fn split_words(s: &str, col0: usize) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut start = 0;
    for (k, c) in s.chars().enumerate() {
        if c.is_whitespace() {
            if !cur.is_empty() {
                out.push((col0 + start, std::mem::take(&mut cur)));
            }
        } else {
            if cur.is_empty() {
                start = k;
            }
            cur.push(c);
        }
    }
    if !cur.is_empty() {
        out.push((col0 + start, cur));
    }
    out
}

/// Parses a signed sum of terms; every term must have internal degree
/// `expected`.
fn parse_expr(pres: &Presentation, text: &str, line: usize, col0: usize, expected: i32) -> Result<Poly, ParseError> {
    let toks = tokenize(text, line, col0)?;
    let end_col = col0 + text.chars().count();
    let mut pos = 0;
    let mut out = Poly::zero();
    if toks.is_empty() {
        return Err(err(line, end_col, ParseErrorKind::Syntax, "empty expression"));
    }
    let mut first = true;
    while pos < toks.len() {
        let mut negative = false;
        match &toks[pos].1 {
            Tok::Plus => pos += 1,
            Tok::Minus => {
                negative = true;
                pos += 1;
            }
            _ if first => {}
            _ => return Err(err(line, toks[pos].0, ParseErrorKind::Syntax, "expected `+` or `-`")),
        }
        first = false;
        let term_col = toks.get(pos).map_or(end_col, |t| t.0);
        let (coeff, mono, is_zero_term) = parse_term(pres, &toks, &mut pos, line, end_col)?;
        let coeff = coeff.signed(negative);
        if is_zero_term {
            continue;
        }
        let deg = pres.mono_degree(&mono);
        if deg != expected && !coeff.is_zero() {
            let nat = |k: i32| pres.flavor().natural(k);
            return Err(err(
                line,
                term_col,
                ParseErrorKind::Inhomogeneous,
                format!("inhomogeneous: term has degree {}, required {}", nat(deg), nat(expected)),
            ));
        }
        out.add_term(mono, coeff);
    }
    Ok(out)
}

/// One term. Returns (coefficient with Koszul sign, monomial, whether the
/// term is the literal `0`).
fn parse_term(
    pres: &Presentation,
    toks: &[(usize, Tok)],
    pos: &mut usize,
    line: usize,
    end_col: usize,
) -> Result<(Scalar, Mono, bool), ParseError> {
    let field = pres.field();
    let mut coeff = field.one();
    let mut mono = pres.one_mono();
    let mut have_coeff = false;
    let mut have_factor = false;
    if let Some((col, Tok::Int(n))) = toks.get(*pos) {
        let col = *col;
        let num = n.clone();
        *pos += 1;
        let mut den = BigInt::from(1);
        if let Some((_, Tok::Slash)) = toks.get(*pos) {
            *pos += 1;
            match toks.get(*pos) {
                Some((dcol, Tok::Int(d))) => {
                    if d == &BigInt::from(0) {
                        return Err(err(line, *dcol, ParseErrorKind::Syntax, "zero denominator"));
                    }
                    den = d.clone();
                    *pos += 1;
                }
                Some((c, _)) => return Err(err(line, *c, ParseErrorKind::Syntax, "expected a denominator")),
                None => return Err(err(line, end_col, ParseErrorKind::Syntax, "expected a denominator")),
            }
        }
        coeff = field.from_fraction(&num, &den).map_err(|e| err(line, col, ParseErrorKind::Field, e.to_string()))?;
        have_coeff = true;
        if let Some((_, Tok::Star)) = toks.get(*pos) {
            *pos += 1;
            if !matches!(toks.get(*pos), Some((_, Tok::Name(_)))) {
                let c = toks.get(*pos).map_or(end_col, |t| t.0);
                return Err(err(line, c, ParseErrorKind::Syntax, "expected a generator after `*`"));
            }
        }
    }
    loop {
        match toks.get(*pos) {
            Some((col, Tok::Name(name))) => {
                let col = *col;
                let i = pres.gen_index(name).ok_or_else(|| {
                    err(line, col, ParseErrorKind::UnknownGenerator, format!("unknown generator `{name}`"))
                })?;
                *pos += 1;
                let mut power = 1u32;
                if let Some((_, Tok::Caret)) = toks.get(*pos) {
                    *pos += 1;
                    match toks.get(*pos) {
                        Some((pcol, Tok::Int(k))) => {
                            power = u32::try_from(k.clone())
                                .ok()
                                .filter(|p| *p <= 1000)
                                .ok_or_else(|| err(line, *pcol, ParseErrorKind::Syntax, "exponent too large"))?;
                            *pos += 1;
                        }
                        Some((c, _)) => return Err(err(line, *c, ParseErrorKind::Syntax, "expected an exponent")),
                        None => return Err(err(line, end_col, ParseErrorKind::Syntax, "expected an exponent")),
                    }
                }
                for _ in 0..power {
                    match pres.mul_mono(&mono, &pres.gen_mono(i)) {
                        Some((neg, m)) => {
                            coeff = coeff.signed(neg);
                            mono = m;
                        }
                        None => {
                            return Err(err(
                                line,
                                col,
                                ParseErrorKind::Parity,
                                format!("odd generator `{name}` squared in a graded-commutative algebra"),
                            ))
                        }
                    }
                }
                have_factor = true;
                match toks.get(*pos) {
                    Some((_, Tok::Star)) => {
                        *pos += 1;
                        if !matches!(toks.get(*pos), Some((_, Tok::Name(_)))) {
                            let c = toks.get(*pos).map_or(end_col, |t| t.0);
                            return Err(err(line, c, ParseErrorKind::Syntax, "expected a generator after `*`"));
                        }
                    }
                    Some((_, Tok::Name(_))) => {}
                    _ => break,
                }
            }
            Some((col, _)) if !have_coeff && !have_factor => {
                return Err(err(line, *col, ParseErrorKind::Syntax, "expected a term"));
            }
            None if !have_coeff && !have_factor => {
                return Err(err(line, end_col, ParseErrorKind::Syntax, "expected a term"));
            }
            _ => break,
        }
    }
    if let Some((col, t)) = toks.get(*pos) {
        if !matches!(t, Tok::Plus | Tok::Minus) {
            return Err(err(line, *col, ParseErrorKind::Syntax, "expected `+`, `-` or end of line"));
        }
    }
    let literal_zero = have_coeff && !have_factor && coeff.is_zero();
    Ok((coeff, mono, literal_zero))
}

/// Canonical text of a presentation; `parse_model(print_model(p)) == p`.
pub fn print_model(pres: &Presentation) -> String {
    let mut s = String::new();
    s.push_str(&format!("format {FORMAT_VERSION}\n"));
    match pres.field() {
        FieldSpec::Rationals => s.push_str("field Q\n"),
        FieldSpec::Prime(p) => s.push_str(&format!("field F {p}\n")),
    }
    s.push_str(&format!("flavor {}\n", pres.flavor().keyword()));
    for g in pres.generators() {
        s.push_str(&format!("gen {} {}\n", g.name, g.degree));
    }
    for (i, g) in pres.generators().iter().enumerate() {
        let p = &pres.differential().images[i];
        if !p.is_zero() {
            s.push_str(&format!("d {} = {}\n", g.name, pres.format_poly(p)));
        }
    }
    s
}
