use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, Criterion};
use cyclefrac::hypergraph::gen_complete;
use cyclefrac::transporter::find_transporters;
use cyclefrac::walks::{counts_from, enumerate_cycles};
use cyclefrac::{lp_oracle, OrderedEdges, TransitionSystem};

fn cycle_enumeration(c: &mut Criterion) {
    let k10 = gen_complete(10, 2).unwrap();
    let k8 = gen_complete(8, 3).unwrap();
    c.bench_function("enumerate 5-cycles in K10", |b| b.iter(|| enumerate_cycles(black_box(&k10), 5).unwrap()));
    c.bench_function("enumerate tight 5-cycles in K8^(3)", |b| b.iter(|| enumerate_cycles(black_box(&k8), 5).unwrap()));
}

fn walk_counting(c: &mut Criterion) {
    let k12 = gen_complete(12, 2).unwrap();
    let oe = OrderedEdges::new(&k12);
    let succ = oe.successors(&k12);
    c.bench_function("walk counts from one ordered edge, K12, length 8", |b| {
        b.iter(|| counts_from(black_box(&succ), 0, 8).unwrap())
    });
}

fn transporter_search(c: &mut Criterion) {
    let k12 = gen_complete(12, 2).unwrap();
    let full = TransitionSystem::full(&k12);
    c.bench_function("one transporter [1,2] -> [3,4] in K12, order 5", |b| {
        b.iter(|| find_transporters(&k12, &full, black_box(&[1, 2]), &[3, 4], 5, 1, 7).unwrap())
    });
}

fn simplex(c: &mut Criterion) {
    let k7 = gen_complete(7, 2).unwrap();
    let mut group = c.benchmark_group("lp");
    group.sample_size(10);
    group.bench_function("phase-one simplex, K7, 5-cycles", |b| {
        b.iter(|| lp_oracle(black_box(&k7), 5, Duration::from_secs(300)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, cycle_enumeration, walk_counting, transporter_search, simplex);
criterion_main!(benches);
