use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use monolab::scenario::{build_nkr, canonical_specs, computed_acyclic, quotient_scenario};
use monolab::MultipartiteSpec;
use std::hint::black_box;

fn spec(lit: &str) -> MultipartiteSpec {
    lit.parse().unwrap()
}

fn quotients(c: &mut Criterion) {
    let mut g = c.benchmark_group("quotient");
    for lit in ["n=2;k=2,2;r=1,2", "n=2;k=2,3;r=1,3", "n=3;k=3,3,3;r=2,2,3"] {
        let (s, sym) = build_nkr(&spec(lit));
        g.bench_with_input(BenchmarkId::from_parameter(lit), &(s, sym), |b, (s, sym)| {
            b.iter(|| quotient_scenario(black_box(s), sym).unwrap())
        });
    }
    g.finish();
}

fn graham(c: &mut Criterion) {
    let mut g = c.benchmark_group("graham");
    for lit in ["n=2;k=2,3;r=1,2", "n=3;k=3,3,3;r=3,3,3", "n=2;k=4,4;r=4,4"] {
        let s = spec(lit);
        g.bench_with_input(BenchmarkId::from_parameter(lit), &s, |b, s| b.iter(|| computed_acyclic(black_box(s))));
    }
    g.finish();
}

fn scan(c: &mut Criterion) {
    let specs = canonical_specs(3, 3, 3);
    c.bench_function("scan n<=3 k,r<=3", |b| {
        b.iter(|| specs.iter().filter(|s| computed_acyclic(s)).count())
    });
}

criterion_group!(benches, quotients, graham, scan);
criterion_main!(benches);
