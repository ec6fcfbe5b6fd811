use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use qmn::fixtures::{self, D4Symbols};
use qmn::grad::{self, Loss};
use qmn::moduli::{self, ModuliLayout};
use qmn::random::rng;
use qmn::relu::{self, Level};
use qmn::RankTolerance;
use qmn_bench::{mlp, random_triple_on, samples};

fn project(c: &mut Criterion) {
    let mut g = c.benchmark_group("project");
    let t = fixtures::d4tilde_triple(&D4Symbols::random(&mut rng(1)));
    g.bench_function("d4tilde", |b| b.iter(|| moduli::project(black_box(&t)).unwrap()));
    for (hidden, d) in [(4, 2), (6, 2), (6, 3)] {
        let t = random_triple_on(hidden, d, 7);
        let layout = Arc::new(ModuliLayout::new(t.frame.clone()).unwrap());
        g.bench_with_input(BenchmarkId::new("random", format!("{hidden}x{d}")), &t, |b, t| {
            b.iter(|| layout.project(black_box(t)).unwrap())
        });
    }
    g.finish();
}

fn simplicity(c: &mut Criterion) {
    let mut g = c.benchmark_group("simplicity");
    let tol = RankTolerance::default();
    for (hidden, d) in [(4, 2), (6, 3)] {
        let t = random_triple_on(hidden, d, 11);
        let layout = Arc::new(ModuliLayout::new(t.frame.clone()).unwrap());
        let id = format!("{hidden}x{d}");
        g.bench_with_input(BenchmarkId::new("fixpoint", &id), &t, |b, t| {
            b.iter(|| moduli::is_simple(black_box(t), tol))
        });
        g.bench_with_input(BenchmarkId::new("rank_vector", &id), &t, |b, t| {
            b.iter(|| layout.project(black_box(t)).unwrap().rank_vector(tol))
        });
    }
    g.finish();
}

fn network(c: &mut Criterion) {
    let mut g = c.benchmark_group("network");
    let n = mlp(&[8, 16, 16, 4], 3);
    let data = samples(&n, 64, 5);
    let s = &data[0];
    g.bench_function("forward", |b| b.iter(|| n.forward(black_box(&s.x)).unwrap()));
    g.bench_function("knowledge_map", |b| b.iter(|| n.knowledge_map(black_box(&s.x)).unwrap()));
    g.bench_function("backprop", |b| b.iter(|| grad::backprop(&n, black_box(&s.x), &s.y, Loss::Mse).unwrap()));
    g.bench_function("backprop_factored", |b| {
        b.iter(|| grad::backprop_factored(&n, black_box(&s.x), &s.y, Loss::Mse).unwrap())
    });
    g.bench_function("batch_gradient_64", |b| {
        b.iter(|| grad::batch_gradient(&n, black_box(&data), Loss::Mse).unwrap())
    });
    g.finish();
}

fn balance(c: &mut Criterion) {
    let mut g = c.benchmark_group("balance");
    let t = fixtures::d4tilde_triple(&D4Symbols::random(&mut rng(2)));
    g.bench_function("d4tilde_level0", |b| b.iter(|| relu::balance(black_box(&t), Level::Zero, 1e-10).unwrap()));
    let t = random_triple_on(8, 1, 13);
    g.bench_function("random8_level0", |b| b.iter(|| relu::balance(black_box(&t), Level::Zero, 1e-10)));
    g.finish();
}

criterion_group!(benches, project, simplicity, network, balance);
criterion_main!(benches);
