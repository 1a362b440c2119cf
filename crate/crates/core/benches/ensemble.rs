//! Sequential against rayon-parallel execution of the same ensembles.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use scramble_core::ensembles::EnsembleSpec;
use scramble_core::experiments::{run_otoc_ensemble, sample_entropy_ensemble, Execution};
use scramble_core::{BasisOperatorLabel, GateOp};

const PATHS: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn entropy(c: &mut Criterion) {
    let mut group = c.benchmark_group("entropy_ensemble");
    group.sample_size(10);
    for n in [120, 360] {
        let spec = EnsembleSpec {
            realizations: 16,
            max_t: 120,
            entropy_cadence: 1,
            ..EnsembleSpec::with_defaults(n)
        };
        for (name, exec) in PATHS {
            group.bench_with_input(BenchmarkId::new(name, n), &spec, |b, spec| {
                b.iter(|| black_box(sample_entropy_ensemble(spec, exec).unwrap()))
            });
        }
    }
    group.finish();
}

fn otoc(c: &mut Criterion) {
    let mut group = c.benchmark_group("otoc_ensemble");
    group.sample_size(10);
    let n = 120;
    let spec = EnsembleSpec {
        realizations: 16,
        max_t: 60,
        ..EnsembleSpec::with_defaults(n)
    };
    let w0 = BasisOperatorLabel::all_x(n);
    let v = [GateOp::c3(0, 1, 2)];
    let times: Vec<usize> = (0..=60).step_by(5).collect();
    for (name, exec) in PATHS {
        group.bench_function(BenchmarkId::new(name, n), |b| {
            b.iter(|| black_box(run_otoc_ensemble(&spec, &v, &w0, &times, exec).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, entropy, otoc);
criterion_main!(benches);
