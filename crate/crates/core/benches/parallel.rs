use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use onto_overlap::bounds::scaling_sweep;
use onto_overlap::graph::hadamard_graph_with;
use onto_overlap::graph::DEFAULT_GRAPH_CAP;
use onto_overlap::ksqubit::{classical_overlap_ks_with, BlochVector};
use onto_overlap::ontomodel::{proposition1_search, RandomModelShape};
use onto_overlap::states::DEFAULT_ENUMERATION_CAP;
use onto_overlap::Execution;

const MODES: [Execution; 2] = [Execution::Sequential, Execution::Parallel];

fn hadamard_graph(c: &mut Criterion) {
    let mut group = c.benchmark_group("hadamard_graph");
    group.sample_size(10);
    for d in [10, 12] {
        for mode in MODES {
            group.bench_with_input(BenchmarkId::new(format!("{mode:?}"), d), &d, |b, &d| {
                b.iter(|| {
                    hadamard_graph_with(
                        black_box(d),
                        DEFAULT_ENUMERATION_CAP,
                        DEFAULT_GRAPH_CAP,
                        mode,
                    )
                    .unwrap()
                })
            });
        }
    }
    group.finish();
}

fn ks_quadrature(c: &mut Criterion) {
    let mut group = c.benchmark_group("ks_overlap");
    let psi = BlochVector::from_angles(0.0, 0.0);
    let phi = BlochVector::from_angles(1.3, 0.0);
    for n in [1 << 14, 1 << 18] {
        for mode in MODES {
            group.bench_with_input(BenchmarkId::new(format!("{mode:?}"), n), &n, |b, &n| {
                b.iter(|| classical_overlap_ks_with(&psi, &phi, black_box(n), mode).unwrap())
            });
        }
    }
    group.finish();
}

fn measure_one_suite(c: &mut Criterion) {
    let mut group = c.benchmark_group("measure_one_suite");
    group.sample_size(10);
    let shape = RandomModelShape::default();
    for mode in MODES {
        group.bench_function(format!("{mode:?}/1000"), |b| {
            b.iter(|| proposition1_search(black_box(1), 1000, &shape, mode).unwrap())
        });
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    let ds: Vec<usize> = (4..=64).collect();
    for mode in MODES {
        group.bench_function(format!("{mode:?}/4..64"), |b| {
            b.iter(|| scaling_sweep(black_box(&ds), 0.5, mode).unwrap())
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    hadamard_graph,
    ks_quadrature,
    measure_one_suite,
    sweep
);
criterion_main!(benches);
