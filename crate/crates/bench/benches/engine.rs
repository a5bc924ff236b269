use criterion::{criterion_group, criterion_main, Criterion};
use perclab::engine::{label_clusters, sample_configuration, separating_indicator_field};
use perclab::geometry::{discretize, DomainKind, DomainSpec};

fn bench_engine(c: &mut Criterion) {
    let spec = DomainSpec::new(
        DomainKind::EquilateralTriangle { side: 1.0 },
        vec![0.0, 1.0 / 3.0, 2.0 / 3.0],
    )
    .unwrap();
    let dd = discretize(&spec, 1.0 / 32.0).unwrap();

    c.bench_function("sample_1_32_triangle", |b| {
        let mut trial = 0u64;
        b.iter(|| {
            trial += 1;
            sample_configuration(&dd, 1, trial)
        })
    });

    c.bench_function("label_1_32_triangle", |b| {
        let cfg = sample_configuration(&dd, 1, 0);
        b.iter(|| label_clusters(&cfg, true))
    });

    c.bench_function("separating_field_1_32_triangle", |b| {
        let cfg = sample_configuration(&dd, 1, 0);
        b.iter(|| separating_indicator_field(&cfg, 0).unwrap())
    });
}

criterion_group!(benches, bench_engine);
criterion_main!(benches);
