use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mimo_cc_lab::harness::{rate_curve_with, Execution, ExperimentConfig};

fn bench_execution(c: &mut Criterion) {
    let mut group = c.benchmark_group("rate_curve");
    group.sample_size(10);
    let cases = [
        ("L2G2t1o2", ExperimentConfig::new(2, 2, 1, 2, vec![0.0, 10.0, 20.0], 16, 1)),
        ("L2G2t1o3", ExperimentConfig::new(2, 2, 1, 3, vec![0.0, 10.0, 20.0], 8, 1)),
    ];
    for (name, cfg) in &cases {
        for (label, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            group.bench_with_input(BenchmarkId::new(label, name), cfg, |b, cfg| {
                b.iter(|| rate_curve_with(cfg, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_execution);
criterion_main!(benches);
