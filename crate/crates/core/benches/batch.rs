use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_bigint::BigInt;

use profinite_lab::depth::{default_schedule, DepthHarness};
use profinite_lab::{fixtures, par, HaltingSet, Registry};

fn halting_set() -> HaltingSet {
    let text = [fixtures::HALT14, fixtures::LOOP_DECLARED].join("\n");
    HaltingSet::new(Registry::parse(&text).unwrap())
}

fn membership(c: &mut Criterion) {
    let set = halting_set();
    let xs: Vec<BigInt> = (-50_000i64..50_000).map(|j| BigInt::from(2 + 60 * j)).collect();
    // warm the simulation cache so both paths measure the decision itself
    set.member_b_batch_seq(&xs);
    let backend = if par::is_parallel() { "rayon" } else { "sequential" };
    let mut group = c.benchmark_group("member_b_batch");
    group.bench_function("sequential", |b| b.iter(|| set.member_b_batch_seq(black_box(&xs))));
    group.bench_function(BenchmarkId::new("batch", backend), |b| {
        b.iter(|| set.member_b_batch(black_box(&xs)))
    });
    group.finish();
}

fn depth(c: &mut Criterion) {
    let set = halting_set();
    let harness = DepthHarness::new(&set, 10_000);
    let schedule = default_schedule();
    let xs: Vec<BigInt> = (-500i64..500).map(|j| BigInt::from(2 + 60 * j)).collect();
    harness.depth_table_seq(&xs, &schedule).unwrap();
    let backend = if par::is_parallel() { "rayon" } else { "sequential" };
    let mut group = c.benchmark_group("depth_table");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| harness.depth_table_seq(black_box(&xs), &schedule).unwrap())
    });
    group.bench_function(BenchmarkId::new("batch", backend), |b| {
        b.iter(|| harness.depth_table(black_box(&xs), &schedule).unwrap())
    });
    group.finish();
}

criterion_group!(benches, membership, depth);
criterion_main!(benches);
