use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dvop_bench::{random_set, synthetic_set};
use dvop_core::*;

fn min_double(c: &mut Criterion) {
    let sets = [
        ("random_n12_d0.6", random_set(12, 0.6, 4, 100)),
        ("synthetic_n16_k3", synthetic_set(3, 16, 3, 4, 200)),
    ];
    let mut group = c.benchmark_group("min_double");
    group.sample_size(10);
    for (name, set) in &sets {
        for method in [Method::Dfs, Method::Naive, Method::Witness] {
            group.bench_with_input(BenchmarkId::new(method.name(), name), set, |b, set| {
                b.iter(|| {
                    for g in set {
                        black_box(
                            run_method(g, method, Objective::MinDouble, &MethodOptions::default())
                                .unwrap(),
                        );
                    }
                })
            });
        }
    }
    group.finish();
}

fn oracle_and_nodes(c: &mut Criterion) {
    let set = random_set(10, 0.6, 4, 300);
    let mut group = c.benchmark_group("small");
    group.sample_size(10);
    group.bench_function("oracle_min_double_n10", |b| {
        b.iter(|| {
            for g in &set {
                black_box(
                    Oracle::default()
                        .brute_optimum(g, Objective::MinDouble)
                        .unwrap(),
                );
            }
        })
    });
    group.bench_function("dfs_min_nodes_n10", |b| {
        b.iter(|| {
            for g in &set {
                black_box(solve(g, Objective::MinNodes, &DfsOptions::default()));
            }
        })
    });
    group.finish();
}

criterion_group!(benches, min_double, oracle_and_nodes);
criterion_main!(benches);
