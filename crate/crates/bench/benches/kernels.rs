use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hgrowth::extremal::{gamma, SearchBudget};
use hgrowth::growth::evolve;
use hgrowth::rate::{rate_search, rho, SearchConfig};
use hgrowth::rational::q;
use hgrowth::{Enhancement, RateQuery, YoungDiagram};
use hgrowth_bench::{random_points, random_subset, zero_sets};

fn bench_evolve(c: &mut Criterion) {
    let mut group = c.benchmark_group("evolve");
    let z = YoungDiagram::triangle(3);
    let none = Enhancement::zero();
    for side in [64, 256, 1024] {
        let a = random_points(side, side, 4.0 / side as f64, 1);
        group.bench_with_input(BenchmarkId::from_parameter(side), &a, |b, a| {
            b.iter(|| evolve(&z, &none, &none, black_box(a)).unwrap())
        });
    }
    group.finish();
}

fn bench_rho(c: &mut Criterion) {
    let mut group = c.benchmark_group("rho");
    let x = RateQuery::new(q(2, 7), q(3, 11)).unwrap();
    for k in [12, 48, 192] {
        let side = (k as f64).sqrt() as usize * 2;
        let a = random_subset(side, side, k, 2);
        group.bench_with_input(BenchmarkId::from_parameter(k), &a, |b, a| {
            b.iter(|| rho(&x, black_box(a)))
        });
    }
    group.finish();
}

fn bench_gamma(c: &mut Criterion) {
    let mut group = c.benchmark_group("gamma");
    group.sample_size(10);
    for (name, z) in zero_sets() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &z, |b, z| {
            b.iter(|| gamma(black_box(z), SearchBudget::default()).unwrap())
        });
    }
    group.finish();
}

fn bench_rate_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("rate_search");
    group.sample_size(10);
    let x = RateQuery::new(q(1, 4), q(1, 5)).unwrap();
    for (name, z) in zero_sets().into_iter().take(3) {
        group.bench_with_input(BenchmarkId::from_parameter(name), &z, |b, z| {
            b.iter(|| rate_search(black_box(z), &x, SearchConfig::default()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_evolve, bench_rho, bench_gamma, bench_rate_search);
criterion_main!(benches);
