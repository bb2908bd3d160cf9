//! Acceptance suite: one PASS/FAIL line per criterion on stderr.
//!
//! Criteria on concrete models run the `gorext` binary, as a user would; the
//! property criteria call the library through the shared test support of
//! the `gorext` crate. Tolerances are exact integer equality throughout,
//! and the runtime limit is 10 s wall clock per command with the cache off.
//!
//! Two criteria are known to fail and are recorded in `KNOWN_RED` together
//! with the reason. The test asserts that the failing set is exactly that
//! set, so a regression elsewhere, or an unexpected fix, is noticed.

#[path = "../../gorext/tests/support/mod.rs"]
mod support;

use std::collections::BTreeSet;
use std::io::Write;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use gorext::algebra::Flavor;
use gorext::ext::{ext_algebra_table, ExtOptions, Window};
use gorext::models::{builtin, catalogue};
use gorext::tcinv::{invariants, Verdict};
use serde_json::Value;

const RUNTIME_LIMIT: Duration = Duration::from_secs(10);

/// Criteria expected to fail, with the analysis behind each.
const KNOWN_RED: &[(&str, &str)] = &[
    (
        "4a",
        "two_cell(7,3) over F3 has Ext^7 = 1: dim Ext^k = t(7-k) + t(8-k) - t(1-k) with t counting \
         words in letters of degrees 6 and 7, and the class f(sa) = 1 does not bound",
    ),
    (
        "5c-unit",
        "the unit representative is a cocycle only for V = 0, so the unit law cannot hold on a \
         model with generators",
    ),
];

struct Run {
    json: Value,
    bytes: Vec<u8>,
    elapsed: Duration,
}

fn gorext(args: &[&str]) -> Result<Run, String> {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_gorext"))
        .args(args)
        .arg("--no-cache")
        .env_remove("GOREXT_CACHE_DIR")
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if !out.status.success() {
        return Err(format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    let json = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    Ok(Run { json, bytes: out.stdout, elapsed })
}

fn dims(j: &Value) -> Vec<(i64, u64)> {
    let mut v: Vec<(i64, u64)> =
        j["dims"].as_object().unwrap().iter().map(|(k, v)| (k.parse().unwrap(), v.as_u64().unwrap())).collect();
    v.sort();
    v
}

fn dim(j: &Value, k: i64) -> Option<u64> {
    j["dims"][k.to_string()].as_u64()
}

fn fd(j: &Value) -> Option<i64> {
    j["formal_dimension"]["value"].as_i64()
}

fn gorenstein(j: &Value) -> &str {
    j["gorenstein"]["verdict"].as_str().unwrap_or("?")
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_limit(r: &Run) -> Result<(), String> {
    ensure(r.elapsed < RUNTIME_LIMIT, || format!("took {:.2?}", r.elapsed))
}

const CASE_II: &[&str] = &["ext", "--builtin", "two_cell:2,3", "--field", "F3", "--window", "-4..6"];
const CASE_I: &[&str] = &["ext", "--builtin", "two_cell:2,1", "--field", "Q", "--window", "-6..6"];
const Q7: &[&str] = &["ext", "--builtin", "two_cell:7,3", "--field", "F3"];

fn criterion_1() -> Result<String, String> {
    let r = gorext(CASE_II)?;
    let want = [(-2, 10), (-1, 6), (0, 4), (1, 2), (2, 2), (3, 1), (4, 0), (5, 0), (6, 0)];
    for (k, d) in want {
        ensure(dim(&r.json, k) == Some(d), || format!("Ext^{k} = {:?}, want {d}", dim(&r.json, k)))?;
    }
    within_limit(&r)?;
    Ok(format!("dims {:?} in {:.2?}", dims(&r.json), r.elapsed))
}

fn criterion_2() -> Result<String, String> {
    let r = gorext(CASE_II)?;
    for i in 0..=4 {
        ensure(dim(&r.json, -i).is_some_and(|d| d > 0), || format!("Ext^-{i} vanishes"))?;
    }
    ensure(fd(&r.json) == Some(3), || format!("fd = {:?}", fd(&r.json)))?;
    ensure(gorenstein(&r.json) == "no", || format!("Gorenstein {}", gorenstein(&r.json)))?;
    Ok("Ext^-i != 0 for i <= 4, fd = 3, Gorenstein no".into())
}

fn criterion_3() -> Result<String, String> {
    let r = gorext(CASE_I)?;
    for (k, d) in dims(&r.json) {
        ensure(d == u64::from(k == 0), || format!("Ext^{k} = {d}"))?;
    }
    ensure(dim(&r.json, 0) == Some(1), || "Ext^0 missing".into())?;
    ensure(gorenstein(&r.json) == "yes", || format!("Gorenstein {}", gorenstein(&r.json)))?;
    ensure(fd(&r.json) == Some(0), || format!("fd = {:?}", fd(&r.json)))?;
    within_limit(&r)?;
    Ok(format!("{{0:1}}, Gorenstein yes, fd 0 in {:.2?}", r.elapsed))
}

fn criterion_4() -> Result<[Result<String, String>; 3], String> {
    let r = gorext(Q7)?;
    let j = &r.json;
    let a = match dim(j, 7) {
        Some(0) => Ok("Ext^7 = 0".into()),
        d => Err(format!("Ext^7 = {d:?}")),
    };
    let b = ensure(fd(j) == Some(8) && j["formal_dimension"]["exact"] == true, || {
        format!("fd = {:?}", j["formal_dimension"])
    })
    .map(|()| "fd = 8, exact".into());
    let above: Vec<_> = dims(j).into_iter().filter(|&(k, d)| k > 8 && d != 0).collect();
    let c = ensure(above.is_empty(), || format!("nonzero above 8: {above:?}"))
        .map(|()| format!("zero on 9..{}", j["window"]["hi"]));
    Ok([a, b, c])
}

fn criterion_5a() -> Result<String, String> {
    let mut n = 0;
    for (name, field) in catalogue() {
        support::check_squares(&builtin(name, field).map_err(|e| e.to_string())?)?;
        n += 1;
    }
    let nonzero = support::fuzz_squares(100)?;
    ensure(nonzero >= 30, || format!("only {nonzero} fuzzed models had d != 0"))?;
    Ok(format!("{n} built-ins, 100 fuzzed ({nonzero} with d != 0)"))
}

fn criterion_5b() -> Result<String, String> {
    let window = Window::new(-4, 8).unwrap();
    let all = catalogue();
    for &(name, field) in &all {
        support::check_contractible(name, field, window, &[2, 3])?;
    }
    Ok(format!("{} built-ins, pairs in degrees 2 and 3, window {window}", all.len()))
}

/// Associativity, commutativity, ev morphism, unit law.
fn criterion_5c() -> Result<[Result<String, String>; 4], String> {
    let mut fails: [Vec<String>; 4] = Default::default();
    let mut n = 0;
    for (name, field) in catalogue() {
        let p = Arc::new(builtin(name, field).map_err(|e| e.to_string())?);
        if p.flavor() != Flavor::Commutative {
            continue;
        }
        n += 1;
        let a = support::product_axioms(p)?;
        for (i, r) in [a.associativity, a.commutativity, a.ev_morphism, a.unit_law].into_iter().enumerate() {
            if let Err(e) = r {
                fails[i].push(format!("{name}: {e}"));
            }
        }
    }
    Ok(fails.map(|f| if f.is_empty() { Ok(format!("{n} commutative built-ins")) } else { Err(f.join("; ")) }))
}

fn criterion_5d() -> Result<String, String> {
    let mut decided = Vec::new();
    for (name, field) in catalogue() {
        let p = Arc::new(builtin(name, field).map_err(|e| e.to_string())?);
        if p.flavor() != Flavor::Commutative {
            continue;
        }
        let w = Window::default_for(&p);
        let e = ext_algebra_table(p.clone(), &ExtOptions::new(w)).map_err(|e| e.to_string())?;
        let s = invariants(p, &e, 2, 6, w).map_err(|e| e.to_string())?;
        if matches!(s.criterion.verdict, Verdict::Inconclusive(_)) {
            continue;
        }
        let c = &s.chain;
        let all = [c.zcl_le_htc, c.ext_zcl_le_htc_ext, c.htc_ext_le_htc_lower];
        ensure(all.iter().all(|x| *x == Some(true)), || format!("{name}: {c:?}"))?;
        decided.push(name);
    }
    ensure(!decided.is_empty(), || "preconditions never passed".into())?;
    Ok(format!("chains hold on {}", decided.join(", ")))
}

fn criterion_5e() -> Result<String, String> {
    let cases = support::bar::cases();
    let n = cases.len();
    for c in cases {
        support::bar::check_against_closure(c)?;
    }
    Ok(format!("{n} tensor presentations on [-3, 3]"))
}

fn criterion_6() -> Result<String, String> {
    let commands: [&[&str]; 4] = [CASE_II, CASE_I, Q7, &["invariants", "--builtin", "product:3,3"]];
    for args in commands {
        let (a, b) = (gorext(args)?, gorext(args)?);
        ensure(a.bytes == b.bytes, || format!("`{}` differs between runs", args.join(" ")))?;
    }
    Ok(format!("{} commands byte-identical across two runs", commands.len()))
}

#[test]
fn acceptance() {
    let mut results: Vec<(&str, Result<String, String>)> = vec![
        ("1", criterion_1()),
        ("2", criterion_2()),
        ("3", criterion_3()),
    ];
    match criterion_4() {
        Ok([a, b, c]) => results.extend([("4a", a), ("4b", b), ("4c", c)]),
        Err(e) => results.extend(["4a", "4b", "4c"].map(|id| (id, Err(e.clone())))),
    }
    results.push(("5a", criterion_5a()));
    results.push(("5b", criterion_5b()));
    let ids = ["5c-assoc", "5c-comm", "5c-ev", "5c-unit"];
    match criterion_5c() {
        Ok(rs) => results.extend(ids.into_iter().zip(rs)),
        Err(e) => results.extend(ids.map(|id| (id, Err(e.clone())))),
    }
    results.push(("5d", criterion_5d()));
    results.push(("5e", criterion_5e()));
    results.push(("6", criterion_6()));

    // Written straight to stderr so the lines survive output capture.
    let mut err = std::io::stderr().lock();
    let mut failed = BTreeSet::new();
    for (id, r) in &results {
        match r {
            Ok(detail) => writeln!(err, "acceptance {id:<9} PASS  {detail}").unwrap(),
            Err(detail) => {
                let known = KNOWN_RED.iter().find(|(k, _)| k == id).map_or("", |_| " (known)");
                writeln!(err, "acceptance {id:<9} FAIL{known}  {detail}").unwrap();
                failed.insert(*id);
            }
        }
    }
    for (id, why) in KNOWN_RED {
        writeln!(err, "known red {id}: {why}").unwrap();
    }
    let expected: BTreeSet<&str> = KNOWN_RED.iter().map(|(id, _)| *id).collect();
    assert_eq!(failed, expected, "failing criteria differ from the known-red set");
}
