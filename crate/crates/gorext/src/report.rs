//! Report emission. JSON is canonical: object keys are sorted (serde_json's
//! default map is ordered), arrays follow fixed basis orders, rationals are
//! `"n/d"` strings and finite-field elements integers.

use serde_json::{json, Value};

use crate::algebra::Presentation;
use crate::ext::{ExtAlgebra, Gorenstein, ProductEntry, Stability, UnitStatus, Window};
use crate::linalg::SparseVec;
use crate::parse::{print_model, FORMAT_VERSION};
use crate::resolution::Counterexample;
use crate::tcinv::{Certified, InvariantSummary, Verdict};

pub const CONVENTION: &str =
    "degrees are cohomological; for Adams-Hilton models Ext^{-q} = Ext_q sits in homological degree q";

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Table,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "json" => Some(Format::Json),
            "csv" => Some(Format::Csv),
            "table" => Some(Format::Table),
            _ => None,
        }
    }
}

/// Pretty canonical JSON with a trailing newline.
pub fn to_json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

/// Nonzero coordinates as `{index: value}`; `{}` is the zero vector.
fn coords_json(v: &SparseVec) -> Value {
    Value::Object(v.iter().map(|(i, c)| (i.to_string(), c.to_json())).collect())
}

fn header(command: &str) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("format".into(), json!(FORMAT_VERSION));
    m.insert("tool".into(), json!({ "name": "gorext", "version": TOOL_VERSION }));
    m.insert("command".into(), json!(command));
    m.insert("convention".into(), json!(CONVENTION));
    m
}

pub fn model_json(pres: &Presentation) -> Value {
    json!({
        "field": pres.field().name(),
        "flavor": pres.flavor().keyword(),
        "generators": pres.generators().iter().map(|g| json!({ "name": g.name, "degree": g.degree })).collect::<Vec<_>>(),
        "text": print_model(pres),
    })
}

fn window_json(w: Window) -> Value {
    json!({ "lo": w.lo, "hi": w.hi })
}

fn certified_json(c: Certified) -> Value {
    json!({ "value": c.value, "exceeds_m_max": c.value.is_none(), "exact": c.exact })
}

pub fn check_json(pres: &Presentation, acyclic: Option<(Window, Result<(), Counterexample>)>) -> Value {
    let mut m = header("check");
    let min_degree = pres.generators().iter().map(|g| g.degree).min();
    m.insert("model".into(), model_json(pres));
    m.insert("valid".into(), json!(pres.check_differential(None).is_ok()));
    m.insert("minimal".into(), json!(pres.linear_part_vanishes()));
    m.insert(
        "linear_part".into(),
        json!(if pres.linear_part_vanishes() { "linear part vanishes" } else { "nonzero linear part" }),
    );
    m.insert("min_generator_degree".into(), json!(min_degree));
    if let Some((w, r)) = acyclic {
        m.insert(
            "closure".into(),
            match r {
                Ok(()) => json!({ "window": window_json(w), "acyclic": true }),
                Err(c) => json!({
                    "window": window_json(w), "acyclic": false,
                    "counterexample": { "degree": c.degree, "dimension": c.dimension }
                }),
            },
        );
    }
    Value::Object(m)
}

fn stability_json(s: Stability) -> Value {
    match s {
        Stability::Exact => json!({ "status": "exact" }),
        Stability::Stable { margin } => json!({ "status": "stable", "margin": margin }),
        Stability::Unstable { margin, first, second } => {
            json!({ "status": "unstable", "margin": margin, "dims": [first, second] })
        }
    }
}

pub fn ext_json(ext: &ExtAlgebra, requested: Window) -> Value {
    let mut m = header("ext");
    m.insert("model".into(), model_json(&ext.pres));
    m.insert("window".into(), window_json(ext.window));
    m.insert("requested_window".into(), window_json(requested));
    m.insert("weight_bound".into(), json!(ext.weight_bound));
    m.insert("margin".into(), json!(ext.margin));
    m.insert("fd_bound".into(), json!(ext.fd_bound));
    let degrees: Vec<Value> = ext
        .groups
        .values()
        .map(|g| {
            let hdim = ext.base_cohomology.get(&g.degree).copied().unwrap_or(0);
            let ev: Vec<Value> = ext.ev[&g.degree].iter().map(coords_json).collect();
            json!({
                "degree": g.degree,
                "dim": g.dim,
                "stability": stability_json(g.stability),
                "base_cohomology_dim": hdim,
                "ev": ev,
            })
        })
        .collect();
    m.insert("degrees".into(), Value::Array(degrees));
    m.insert("dims".into(), Value::Object(ext.groups.values().map(|g| (g.degree.to_string(), json!(g.dim))).collect()));
    m.insert("total_dim".into(), json!(ext.total_dim()));
    let g = ext.gorenstein_test();
    let reason = match &g {
        Gorenstein::Unknown(r) => Some(r.clone()),
        _ => None,
    };
    m.insert("gorenstein".into(), json!({ "verdict": g.keyword(), "reason": reason }));
    let fd = ext.formal_dimension();
    m.insert("formal_dimension".into(), json!({ "value": fd.value, "exact": fd.exact }));
    m.insert("ev_nonzero".into(), json!(ext.ev_nonzero()));
    let products = ext.products.as_ref().map(|t| {
        let entries: Vec<Value> = t
            .entries
            .iter()
            .map(|(&(da, ia, db, ib), e)| {
                let value = match e {
                    ProductEntry::Coords(v) => coords_json(v),
                    ProductEntry::OutOfWindow => json!("out_of_window"),
                };
                json!({ "a": [da, ia], "b": [db, ib], "product": value })
            })
            .collect();
        let check = |c: &crate::ext::AxiomCheck| json!({ "checked": c.checked, "passed": c.passed(), "failures": c.failures });
        let unit = match &t.unit {
            UnitStatus::Class(u) => json!({ "status": "class", "coords": coords_json(u) }),
            UnitStatus::NotACocycle => json!({ "status": "not_a_cocycle" }),
            UnitStatus::NotApplicable => json!({ "status": "not_applicable" }),
        };
        json!({
            "lift": format!("{:?}", t.lift).to_lowercase(),
            "entries": entries,
            "unit": unit,
            "axioms": {
                "associativity": check(&t.associativity),
                "commutativity": check(&t.commutativity),
                "unit_law": check(&t.unit_law),
                "ev_morphism": check(&t.ev_morphism),
            },
        })
    });
    m.insert("products".into(), products.unwrap_or(Value::Null));
    Value::Object(m)
}

pub fn invariants_json(pres: &Presentation, s: &InvariantSummary, window: Window) -> Value {
    let mut m = header("invariants");
    m.insert("model".into(), model_json(pres));
    m.insert("window".into(), window_json(window));
    m.insert("n".into(), json!(s.n));
    m.insert("m_max".into(), json!(s.m_max));
    m.insert("zcl".into(), certified_json(s.zcl));
    m.insert("htc_lower".into(), certified_json(s.htc_lower));
    m.insert("ext_zcl".into(), certified_json(s.ext_zcl));
    let mut he = certified_json(s.htc_ext.value);
    he["omega_order"] = json!(s.htc_ext.omega_order);
    m.insert("htc_ext".into(), he);
    let reason = match &s.criterion.verdict {
        Verdict::Inconclusive(r) => Some(r.clone()),
        _ => None,
    };
    let witness: Vec<Value> = s
        .criterion
        .witness
        .iter()
        .map(|w| json!({ "power": w.power, "chain_level": w.chain, "class_level": w.class }))
        .collect();
    m.insert(
        "criterion".into(),
        json!({ "verdict": s.criterion.verdict.keyword(), "reason": reason, "m": s.criterion.m, "witness": witness }),
    );
    m.insert(
        "chain".into(),
        json!({
            "zcl<=htc_lower": s.chain.zcl_le_htc,
            "ext_zcl<=htc_ext": s.chain.ext_zcl_le_htc_ext,
            "htc_ext<=htc_lower": s.chain.htc_ext_le_htc_lower,
            "holds": s.chain.holds(),
        }),
    );
    Value::Object(m)
}

/// Header and rows for the tabular formats.
pub fn ext_rows(ext: &ExtAlgebra) -> (Vec<String>, Vec<Vec<String>>) {
    let headers = ["degree", "dim", "stability", "ev_nonzero"].map(String::from).to_vec();
    let rows = ext
        .groups
        .values()
        .map(|g| {
            let ev = ext.ev[&g.degree].iter().any(|v| !v.is_zero());
            vec![g.degree.to_string(), g.dim.to_string(), g.stability.keyword().to_string(), ev.to_string()]
        })
        .collect();
    (headers, rows)
}

fn opt(v: Option<u32>) -> String {
    v.map_or_else(|| ">m_max".to_string(), |x| x.to_string())
}

pub fn invariant_rows(s: &InvariantSummary) -> (Vec<String>, Vec<Vec<String>>) {
    let headers = ["invariant", "value", "exact"].map(String::from).to_vec();
    let row = |name: &str, c: Certified| vec![name.to_string(), opt(c.value), c.exact.to_string()];
    let rows = vec![
        row("zcl", s.zcl),
        row("htc_lower", s.htc_lower),
        row("ext_zcl", s.ext_zcl),
        row("htc_ext", s.htc_ext.value),
        vec!["criterion".into(), s.criterion.verdict.keyword().into(), s.criterion.m.to_string()],
        vec!["chain".into(), s.chain.holds().to_string(), String::new()],
    ];
    (headers, rows)
}

pub fn csv(headers: &[String], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(headers).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8")
}

/// Left-aligned columns separated by two spaces.
pub fn table(headers: &[String], rows: &[Vec<String>]) -> String {
    let ncol = headers.len();
    let mut width = vec![0; ncol];
    for r in std::iter::once(headers).chain(rows.iter().map(Vec::as_slice)) {
        for (i, c) in r.iter().enumerate() {
            width[i] = width[i].max(c.chars().count());
        }
    }
    let line = |r: &[String]| {
        let cells: Vec<String> =
            r.iter().enumerate().map(|(i, c)| format!("{c:<w$}", w = width[i])).collect();
        cells.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(headers);
    for r in rows {
        out.push_str(&line(r));
    }
    out
}
