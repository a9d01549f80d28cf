use criterion::{criterion_group, criterion_main, Criterion};
use monolab::locality::{self, xor_chsh, Ceilings};
use monolab::model::{self, average_quotient};
use monolab::scenario::build_nkr;
use monolab::MultipartiteSpec;
use std::hint::black_box;

fn spec(lit: &str) -> MultipartiteSpec {
    lit.parse().unwrap()
}

fn lp(c: &mut Criterion) {
    let chsh = xor_chsh();
    let base = build_nkr(&spec("n=2;k=2,2;r=1,1")).0;
    let ceilings = Ceilings::default();
    c.bench_function("ns_max chsh", |b| {
        b.iter(|| locality::ns_max(black_box(&chsh), &base, ceilings.ns).unwrap())
    });
    let pr = model::pr_box();
    c.bench_function("global_extension pr box", |b| {
        b.iter(|| locality::global_extension(black_box(&pr), ceilings.global).unwrap())
    });
    let bounded = chsh.clone().with_bound(Some(locality::local_bound(&chsh, &base, ceilings.global).unwrap().0));
    let mut g = c.benchmark_group("monogamy");
    g.sample_size(10);
    g.bench_function("chsh r=1,2", |b| {
        b.iter(|| locality::monogamy_check(&bounded, &spec("n=2;k=2,2;r=1,2"), ceilings).unwrap())
    });
    g.finish();
}

fn averaging(c: &mut Criterion) {
    let m = model::pr_times_uniform();
    let (_, sym) = build_nkr(&spec("n=2;k=2,2;r=1,2"));
    c.bench_function("average pr x uniform", |b| {
        b.iter(|| average_quotient(black_box(&m), sym.partition()).unwrap())
    });
}

criterion_group!(benches, lp, averaging);
criterion_main!(benches);
