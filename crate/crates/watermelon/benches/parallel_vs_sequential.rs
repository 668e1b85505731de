//! Parallel core against a single worker.
//!
//! The "sequential" runs execute the same code inside a one-thread rayon
//! pool. Building with `--no-default-features` removes rayon from the library
//! altogether; both groups then measure the sequential fallback.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use watermelon::cbident::{cb_pair_sum, CBSpec};
use watermelon::paths::{enumerate_watermelons, WatermelonSpec};
use watermelon::ring::seeded_rationals;
use watermelon::xx0::{persistence, ChainConfig, DEFAULT_BUDGET};

fn workloads() -> Vec<(&'static str, Box<dyn Fn() + Sync>)> {
    let cfg = ChainConfig::new(30, 4).unwrap();
    let pts = seeded_rationals(3, 6);
    let spec = CBSpec::unrestricted(6, 0, pts[..3].to_vec(), pts[3..].to_vec());
    let melons = WatermelonSpec::new(3, 3, 3, 0, 0).unwrap();
    vec![
        (
            "persistence_N4_M30",
            Box::new(move || {
                black_box(persistence(&cfg, 2, 5.0, DEFAULT_BUDGET).unwrap());
            }),
        ),
        (
            "cauchy_binet_sum_N3_L6",
            Box::new(move || {
                black_box(cb_pair_sum(&spec).unwrap());
            }),
        ),
        (
            "watermelons_N3_M3",
            Box::new(move || {
                black_box(enumerate_watermelons(&melons).len());
            }),
        ),
    ]
}

fn compare(c: &mut Criterion) {
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let mut group = c.benchmark_group("parallel_vs_sequential");
    group.sample_size(10);
    for (name, work) in workloads() {
        group.bench_function(BenchmarkId::new("parallel", name), |b| b.iter(&work));
        group.bench_function(BenchmarkId::new("sequential", name), |b| {
            b.iter(|| single.install(&work))
        });
    }
    group.finish();
}

criterion_group!(benches, compare);
criterion_main!(benches);
