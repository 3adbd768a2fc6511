use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use projconvex::group::convex_core_approx;
use projconvex::*;
use projconvex_bench::{example, interior_points};
use std::hint::black_box;

fn distance(c: &mut Criterion) {
    let mut g = c.benchmark_group("hilbert_distance");
    for name in ["triangle-pqr", "simplex-z2", "cone-fuchsian"] {
        let e = example(name);
        let p = interior_points(&e.domain, 64);
        g.bench_function(name, |b| {
            b.iter(|| p.windows(2).map(|w| e.domain.distance_vec(&w[0], &w[1]).unwrap()).sum::<f64>())
        });
    }
    g.finish();
}

fn balls(c: &mut Criterion) {
    let mut g = c.benchmark_group("ball");
    g.sample_size(10);
    let e = example("triangle-pqr");
    let gens = e.group.generators()[..e.group.generator_count()].to_vec();
    for l in [6, 8, 10] {
        // a fresh group each time: balls are cached per group
        g.bench_with_input(BenchmarkId::new("triangle-pqr", l), &l, |b, &l| {
            b.iter(|| MatrixGroup::new(gens.clone(), None).unwrap().ball(l).unwrap().len())
        });
    }
    g.finish();
}

fn hulls(c: &mut Criterion) {
    let mut g = c.benchmark_group("core");
    g.sample_size(10);
    for name in ["simplex-z2", "cone-fuchsian"] {
        let e = example(name);
        g.bench_function(name, |b| b.iter(|| convex_core_approx(&e.group, &e.domain, black_box(6)).unwrap()));
    }
    g.finish();
}

fn gaps(c: &mut Criterion) {
    let mut g = c.benchmark_group("gap_profile");
    g.sample_size(10);
    let e = example("sym2-fuchsian");
    g.bench_function("sym2-fuchsian L8", |b| b.iter(|| gap_profile(&e.group, 1, black_box(8)).unwrap().slope));
    let h = e.group.evaluate(&e.group.parse_word("xY").unwrap()).pow(5);
    g.bench_function("singular_gap", |b| b.iter(|| singular_gap(black_box(&h), 1)));
    g.finish();
}

criterion_group!(benches, distance, balls, hulls, gaps);
criterion_main!(benches);
