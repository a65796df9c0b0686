use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use robusttest_bench::{law, pairs, sample, SEED};
use robusttest_core::experiments::{estimate_error, ExperimentSpec};
use robusttest_core::hypothesis::{hellinger_statistic, laplace_sample, log_likelihood_ratio};
use robusttest_core::TestKind;

fn statistics(c: &mut Criterion) {
    let mut group = c.benchmark_group("statistic");
    for (name, p, q) in pairs() {
        let xs = sample(&q, 2000);
        group.throughput(Throughput::Elements(xs.len() as u64));
        group.bench_with_input(BenchmarkId::new("hellinger", name), &xs, |b, xs| {
            b.iter(|| hellinger_statistic(&p, &q, black_box(xs)))
        });
        group.bench_with_input(BenchmarkId::new("likelihood_ratio", name), &xs, |b, xs| {
            b.iter(|| log_likelihood_ratio(&p, &q, black_box(xs)))
        });
    }
    group.finish();
}

fn sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample");
    for (name, p, _) in pairs() {
        group.throughput(Throughput::Elements(10_000));
        group.bench_function(name, |b| b.iter(|| p.sample(10_000, black_box(SEED))));
    }
    group.bench_function("laplace", |b| b.iter(|| laplace_sample(2.0, black_box(SEED))));
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("estimate_error");
    group.sample_size(10);
    for kind in [TestKind::Hellinger, TestKind::NeymanPearson, TestKind::Scheffe] {
        let spec = ExperimentSpec::new(law("bern(0.5)"), law("bern(0.6)"), kind).with_trials(200);
        group.bench_function(kind.as_str(), |b| b.iter(|| estimate_error(&spec, 500)));
    }
    group.finish();
}

criterion_group!(benches, statistics, sampling, monte_carlo);
criterion_main!(benches);
