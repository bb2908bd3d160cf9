//! Parallel (default rayon pool) against a single-thread pool on the same
//! Ext computations. Build with `--no-default-features` to time the purely
//! sequential code path instead.

use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gorext::ext::{ext_algebra_table, ext_groups, ExtOptions, Window};
use gorext::field::FieldSpec;
use gorext::models::builtin;

fn cases() -> Vec<(&'static str, FieldSpec, Window, bool)> {
    vec![
        ("two_cell:2,3", FieldSpec::Prime(3), Window { lo: -4, hi: 6 }, false),
        ("product:3,3", FieldSpec::Rationals, Window { lo: -6, hi: 12 }, true),
        ("sphere:4", FieldSpec::Rationals, Window { lo: -4, hi: 10 }, true),
    ]
}

fn run(name: &str, field: FieldSpec, window: Window, table: bool) {
    let p = Arc::new(builtin(name, field).unwrap());
    let o = ExtOptions::new(window);
    if table {
        ext_algebra_table(p, &o).unwrap();
    } else {
        ext_groups(p, &o).unwrap();
    }
}

fn bench(c: &mut Criterion) {
    let mut g = c.benchmark_group("ext");
    g.sample_size(10);
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    for (name, field, window, table) in cases() {
        g.bench_with_input(BenchmarkId::new("parallel", name), &(), |b, _| {
            b.iter(|| run(name, field, window, table))
        });
        g.bench_with_input(BenchmarkId::new("one_thread", name), &(), |b, _| {
            b.iter(|| single.install(|| run(name, field, window, table)))
        });
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
