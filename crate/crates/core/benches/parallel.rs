use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fermicluster::analyzer::{measurement_semantics_deviation, Family};
use fermicluster::cluster::{chain_schedule, sweep_patterns};
use fermicluster::fermion::{pbs_matrix, verify_parity_povm};
use fermicluster::qstate::{run_schedule_with, RunMode, StateVector};
use fermicluster::Exec;

const EXECS: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn pattern_sweep(c: &mut Criterion) {
    let mut g = c.benchmark_group("pattern_sweep");
    g.sample_size(10);
    for n in [10usize, 12] {
        for (name, exec) in EXECS {
            g.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| {
                b.iter(|| sweep_patterns(n, 1e-10, exec).unwrap())
            });
        }
    }
    g.finish();
}

fn chain_enumeration(c: &mut Criterion) {
    let mut g = c.benchmark_group("chain_enumeration");
    g.sample_size(10);
    let n = 10;
    let sched = chain_schedule(n, true).unwrap();
    let start = StateVector::plus_product(n).unwrap();
    for (name, exec) in EXECS {
        g.bench_function(BenchmarkId::new(name, n), |b| {
            b.iter(|| run_schedule_with(&start, &sched, &RunMode::Enumerate, exec).unwrap())
        });
    }
    g.finish();
}

fn semantics(c: &mut Criterion) {
    let mut g = c.benchmark_group("measurement_semantics_quad");
    for (name, exec) in EXECS {
        g.bench_function(name, |b| {
            b.iter(|| measurement_semantics_deviation(Family::Quad, 100, 1, exec).unwrap())
        });
    }
    g.finish();
}

fn fermion(c: &mut Criterion) {
    let mut g = c.benchmark_group("fermion_povm");
    let u = pbs_matrix();
    for (name, exec) in EXECS {
        g.bench_function(name, |b| b.iter(|| verify_parity_povm(1000, 1, &u, 1e-10, exec).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, pattern_sweep, chain_enumeration, semantics, fermion);
criterion_main!(benches);
