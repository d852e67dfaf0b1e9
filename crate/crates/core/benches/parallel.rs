use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use cubical::construct::{base_p6, build_induced_nonlayered, build_nonlayered, leaf_expand};
use cubical::embedding::{is_induced_with, labelling_to_embedding};
use cubical::exec::Execution;
use cubical::graph::{girth_with, Graph};
use cubical::labelling::verify_layered_with;
use cubical::solver::{enumerate_labellings, sample_layered_labellings_with, Budget, Property};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn girth(c: &mut Criterion) {
    let built = build_nonlayered(6).unwrap();
    let mut group = c.benchmark_group("girth");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, built.graph().vertex_count()), |b| {
            b.iter(|| girth_with(black_box(built.graph()), exec))
        });
    }
    group.finish();
}

fn layered_check(c: &mut Criterion) {
    let built = build_nonlayered(6).unwrap();
    let mut group = c.benchmark_group("verify_layered");
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| {
                verify_layered_with(black_box(built.graph()), built.labelling(), exec).is_ok()
            })
        });
    }
    group.finish();
}

fn enumeration(c: &mut Criterion) {
    // a spider with three legs of length four: many layered labellings
    let spider = Graph::new(
        13,
        [
            (0, 1),
            (1, 2),
            (2, 3),
            (3, 4),
            (0, 5),
            (5, 6),
            (6, 7),
            (7, 8),
            (0, 9),
            (9, 10),
            (10, 11),
            (11, 12),
        ],
    )
    .unwrap();
    let mut group = c.benchmark_group("enumerate_layered");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| {
                enumerate_labellings(
                    black_box(&spider),
                    Property::Layered,
                    Budget::unlimited(),
                    exec,
                    |_| true,
                )
                .unwrap()
                .count
            })
        });
    }
    group.finish();
}

fn sampling(c: &mut Criterion) {
    let tree = leaf_expand(&base_p6()).tree().clone();
    let mut group = c.benchmark_group("sample_layered");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| {
                sample_layered_labellings_with(black_box(&tree), 200, 1, exec)
                    .unwrap()
                    .len()
            })
        });
    }
    group.finish();
}

fn induced(c: &mut Criterion) {
    let built = build_induced_nonlayered(6).unwrap();
    let f = labelling_to_embedding(built.graph(), built.labelling(), 0).unwrap();
    let mut group = c.benchmark_group("is_induced");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| is_induced_with(black_box(built.graph()), &f, exec).is_ok())
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    girth,
    layered_check,
    enumeration,
    sampling,
    induced
);
criterion_main!(benches);
