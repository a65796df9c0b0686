use criterion::{black_box, criterion_group, criterion_main, Criterion};
use robusttest_bench::pairs;
use robusttest_core::divergences::{compute, Metric, Route};

fn metrics(c: &mut Criterion) {
    let mut group = c.benchmark_group("divergences");
    for (name, p, q) in pairs() {
        for metric in [Metric::Hellinger, Metric::TotalVariation, Metric::Kl] {
            group.bench_function(format!("{name}/{}", metric.as_str()), |b| {
                b.iter(|| compute(metric, black_box(&p), black_box(&q), Route::Auto))
            });
        }
    }
    group.finish();
}

fn quadrature(c: &mut Criterion) {
    let mut group = c.benchmark_group("quadrature");
    group.sample_size(20);
    for (name, p, q) in pairs().into_iter().filter(|(_, p, _)| !p.is_discrete()) {
        group.bench_function(name, |b| {
            b.iter(|| compute(Metric::Hellinger, black_box(&p), black_box(&q), Route::Quadrature))
        });
    }
    group.finish();
}

criterion_group!(benches, metrics, quadrature);
criterion_main!(benches);
