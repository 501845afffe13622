//! Benches the data-parallel kernels against their sequential fallbacks.
//!
//! Build with default features to pit the rayon path against the reference
//! kernels; `cargo bench --no-default-features` measures the build where
//! every dispatched entry point runs sequentially.

use criterion::{criterion_group, criterion_main, Criterion};
use reebmap_core::confidence::{bootstrap_eta, bootstrap_eta_seq};
use reebmap_core::filters::coordinate_filter;
use reebmap_core::geometry::{pairwise_distances, pairwise_distances_seq, PointCloud};
use reebmap_core::seeds::rng_from_seed;
use reebmap_core::tuning::{tune, tune_delta_subsample, tune_delta_subsample_seq, TuneConfig};
use std::hint::black_box;

fn circle(n: usize) -> PointCloud {
    let pts: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let t = i as f64 / n as f64 * std::f64::consts::TAU;
            vec![t.cos(), t.sin()]
        })
        .collect();
    PointCloud::new(pts).unwrap()
}

fn bench_distances(c: &mut Criterion) {
    let pc = circle(1500);
    let mut group = c.benchmark_group("pairwise_distances_1500");
    group.sample_size(10);
    group.bench_function("dispatched", |b| {
        b.iter(|| pairwise_distances(black_box(&pc)))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| pairwise_distances_seq(black_box(&pc)))
    });
    group.finish();
}

fn bench_delta_tuning(c: &mut Criterion) {
    let dm = pairwise_distances(&circle(1200));
    let mut group = c.benchmark_group("tune_delta_subsample_1200x50");
    group.sample_size(10);
    group.bench_function("dispatched", |b| {
        b.iter(|| {
            let mut rng = rng_from_seed(7);
            tune_delta_subsample(black_box(&dm), 0.001, 50, &mut rng).unwrap()
        })
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            let mut rng = rng_from_seed(7);
            tune_delta_subsample_seq(black_box(&dm), 0.001, 50, &mut rng).unwrap()
        })
    });
    group.finish();
}

fn bench_bootstrap(c: &mut Criterion) {
    let pc = circle(300);
    let dm = pairwise_distances(&pc);
    let fv = coordinate_filter(&pc, 0).unwrap();
    let params = tune(&dm, &fv, &TuneConfig::default(), &mut rng_from_seed(1)).unwrap();
    let mut group = c.benchmark_group("bootstrap_eta_300x40");
    group.sample_size(10);
    group.bench_function("dispatched", |b| {
        b.iter(|| {
            let mut rng = rng_from_seed(2);
            bootstrap_eta(black_box(&dm), &fv, &params, 40, 0.15, &mut rng).unwrap()
        })
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            let mut rng = rng_from_seed(2);
            bootstrap_eta_seq(black_box(&dm), &fv, &params, 40, 0.15, &mut rng).unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, bench_distances, bench_delta_tuning, bench_bootstrap);
criterion_main!(benches);
