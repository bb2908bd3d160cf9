use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn gorext(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gorext")).args(args).env_remove("GOREXT_CACHE_DIR").output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn with_cache(args: &[&str], dir: &Path) -> Output {
    let mut v = args.to_vec();
    v.extend(["--cache-dir", dir.to_str().unwrap()]);
    gorext(&v)
}

const TWO_CELL: &[&str] = &["ext", "--builtin", "two_cell:2,3", "--field", "F3", "--window", "-4..6"];

#[test]
fn malformed_model_is_a_usage_error_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.gm");
    fs::write(&f, "gen x 3\nd x = 1 +\n").unwrap();
    let o = gorext(&["check", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2, column"), "{}", stderr(&o));
}

#[test]
fn odd_generators_over_fp_are_a_compute_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("odd.gm");
    fs::write(&f, "field F3\nflavor sullivan\ngen x 3\n").unwrap();
    let o = gorext(&["ext", f.to_str().unwrap(), "--no-cache"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn tensor_models_have_no_invariants() {
    let o = gorext(&["invariants", "--builtin", "sphere:3,ah"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_window_is_a_usage_error() {
    let o = gorext(&["ext", "--builtin", "point", "--window", "3..1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn cache_hits_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let first = with_cache(TWO_CELL, dir.path());
    assert!(first.status.success(), "{}", stderr(&first));
    assert!(!stderr(&first).contains("served from cache"));
    let second = with_cache(TWO_CELL, dir.path());
    assert!(stderr(&second).contains("served from cache"));
    assert_eq!(first.stdout, second.stdout);

    // A different window is a different key.
    let mut other = TWO_CELL.to_vec();
    other[6] = "-3..6";
    let third = with_cache(&other, dir.path());
    assert!(!stderr(&third).contains("served from cache"));
    assert_ne!(third.stdout, first.stdout);
}

#[test]
fn corrupt_entries_are_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let first = with_cache(TWO_CELL, dir.path());
    let entry = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).find(|p| p.extension().is_some_and(|x| x == "entry")).unwrap();
    let mut bytes = fs::read(&entry).unwrap();
    let last = bytes.len() - 2;
    bytes[last] ^= 1;
    fs::write(&entry, bytes).unwrap();
    let second = with_cache(TWO_CELL, dir.path());
    assert!(second.status.success());
    assert!(stderr(&second).contains("warning"), "{}", stderr(&second));
    assert_eq!(first.stdout, second.stdout);
    // The recomputed entry replaced the corrupt one.
    assert!(stderr(&with_cache(TWO_CELL, dir.path())).contains("served from cache"));
}

#[test]
fn purge_empties_the_cache() {
    let dir = tempfile::tempdir().unwrap();
    with_cache(TWO_CELL, dir.path());
    with_cache(&["ext", "--builtin", "point"], dir.path());
    let d = dir.path().to_str().unwrap();
    let info = String::from_utf8(gorext(&["cache", "info", "--cache-dir", d]).stdout).unwrap();
    assert!(info.contains("2 entries"), "{info}");
    let purge = String::from_utf8(gorext(&["cache", "purge", "--cache-dir", d]).stdout).unwrap();
    assert!(purge.contains("removed 2"), "{purge}");
    let info = String::from_utf8(gorext(&["cache", "info", "--cache-dir", d]).stdout).unwrap();
    assert!(info.contains("0 entries"), "{info}");
}

#[test]
fn models_list_and_emit() {
    let list = String::from_utf8(gorext(&["models", "list"]).stdout).unwrap();
    for name in ["point", "sphere", "two_cell", "suspension", "product"] {
        assert!(list.lines().any(|l| l.starts_with(name)), "{name} missing from\n{list}");
    }
    let o = gorext(&["models", "emit", "two_cell", "2,3", "--field", "F3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("field F 3") || text.contains("field F3"), "{text}");

    // Emitted text is a valid model file with the same Ext.
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("m.gm");
    fs::write(&f, &text).unwrap();
    let from_file = gorext(&["ext", f.to_str().unwrap(), "--window", "-4..6", "--format", "csv"]);
    let csv_args = [TWO_CELL, &["--format", "csv"]].concat();
    assert_eq!(from_file.stdout, gorext(&csv_args).stdout);
}

#[test]
fn csv_and_table_formats() {
    let csv = String::from_utf8(gorext(&[TWO_CELL, &["--format", "csv"]].concat()).stdout).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("degree,dim"));
    assert!(csv.lines().any(|l| l.starts_with("-2,10,")), "{csv}");
    let table = String::from_utf8(gorext(&[TWO_CELL, &["--format", "table"]].concat()).stdout).unwrap();
    assert!(table.lines().next().unwrap().split_whitespace().take(2).eq(["degree", "dim"]));
    assert_eq!(table.lines().count(), csv.lines().count());
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(gorext(&["--help"]).status.code(), Some(0));
    assert_eq!(gorext(&["--version"]).status.code(), Some(0));
    assert_eq!(gorext(&["frobnicate"]).status.code(), Some(1));
}
