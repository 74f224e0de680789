//! Criterion benches: build cost and query latency per index, with the
//! linear-scan oracle as the no-index yardstick, plus snapshot I/O.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rovi_bench::{scenario, Scenario};
use rovi_core::{
    oracle_search, DoubleIndex, QivIndex, QivParams, SpatialFirstIndex, VisualFirstIndex,
};

fn bench_builds(c: &mut Criterion) {
    let Scenario { users, vocab, .. } = scenario(2_000, 9);
    let mut group = c.benchmark_group("build");
    group.sample_size(20);
    group.bench_function("qiv", |b| {
        b.iter(|| QivIndex::build(users.clone(), vocab.clone(), QivParams::default()).unwrap())
    });
    group.bench_function("di", |b| {
        b.iter(|| DoubleIndex::build(users.clone(), vocab.clone()).unwrap())
    });
    group.bench_function("vfi", |b| {
        b.iter(|| VisualFirstIndex::build(users.clone(), vocab.clone()).unwrap())
    });
    group.bench_function("sfi", |b| {
        b.iter(|| SpatialFirstIndex::build(users.clone(), vocab.clone()).unwrap())
    });
    group.finish();
}

fn bench_queries(c: &mut Criterion) {
    let Scenario { users, vocab, queries } = scenario(5_000, 9);
    let qiv = QivIndex::build(users.clone(), vocab.clone(), QivParams::default()).unwrap();
    let di = DoubleIndex::build(users.clone(), vocab.clone()).unwrap();
    let vfi = VisualFirstIndex::build(users.clone(), vocab.clone()).unwrap();
    let sfi = SpatialFirstIndex::build(users.clone(), vocab.clone()).unwrap();

    // Each iteration runs the whole 16-query workload once.
    let mut group = c.benchmark_group("query-pass");
    group.sample_size(20);
    group.bench_function("oracle", |b| {
        b.iter(|| {
            for q in &queries {
                black_box(oracle_search(&users, &vocab, q));
            }
        })
    });
    group.bench_function("qiv", |b| {
        b.iter(|| {
            for q in &queries {
                black_box(qiv.search(q));
            }
        })
    });
    group.bench_function("di", |b| {
        b.iter(|| {
            for q in &queries {
                black_box(di.search(q));
            }
        })
    });
    group.bench_function("vfi", |b| {
        b.iter(|| {
            for q in &queries {
                black_box(vfi.search(q));
            }
        })
    });
    group.bench_function("sfi", |b| {
        b.iter(|| {
            for q in &queries {
                black_box(sfi.search(q));
            }
        })
    });
    group.finish();
}

fn bench_snapshot(c: &mut Criterion) {
    let Scenario { users, vocab, .. } = scenario(2_000, 9);
    let index = QivIndex::build(users, vocab, QivParams::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bench.qiv");
    index.save(&path).unwrap();

    let mut group = c.benchmark_group("snapshot");
    group.sample_size(20);
    group.bench_function("save", |b| b.iter(|| index.save(black_box(&path)).unwrap()));
    group.bench_function("load", |b| b.iter(|| QivIndex::load(black_box(&path)).unwrap()));
    group.finish();
}

criterion_group!(benches, bench_builds, bench_queries, bench_snapshot);
criterion_main!(benches);
