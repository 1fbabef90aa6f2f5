use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use transnum::dynamics::{
    local_translation_number, mean_translation_number, BundleAutomorphism, LocalOptions,
    MeanOptions,
};
use transnum::{CohomologyClass, InvariantMeasure, LiftedMap, TorusPoint, TrigPolynomial};

fn local(c: &mut Criterion) {
    let a = CohomologyClass::integer(&[1]).unwrap();
    let x = TorusPoint::origin(1);
    let mut group = c.benchmark_group("local_translation_number");
    let golden = BundleAutomorphism::new(LiftedMap::rotation(&[0.6180339887498949]).unwrap(), 0.0);
    group.bench_function("golden_rotation", |b| {
        b.iter(|| local_translation_number(&a, &golden, &x, &LocalOptions::default()).unwrap())
    });
    for iters in [1_000usize, 10_000] {
        let arnold = BundleAutomorphism::new(LiftedMap::arnold(0.3, 0.9).unwrap(), 0.0);
        let opts = LocalOptions {
            max_iterations: iters,
            tolerance: 1e-15,
            ..Default::default()
        };
        group.bench_with_input(
            BenchmarkId::new("arnold_fixed_budget", iters),
            &opts,
            |b, o| b.iter(|| local_translation_number(&a, &arnold, &x, black_box(o)).unwrap()),
        );
    }
    group.finish();
}

fn mean(c: &mut Criterion) {
    let a = CohomologyClass::integer(&[0, 1]).unwrap();
    let cfun = TrigPolynomial::fourier_1d(0.3, &[], &[0.1]).unwrap();
    let g = BundleAutomorphism::new(
        LiftedMap::skew_product(0.6180339887498949, cfun).unwrap(),
        0.0,
    );
    let mu = InvariantMeasure::lebesgue(2);
    let mut group = c.benchmark_group("mean_translation_number");
    group.sample_size(20);
    for n in [64usize, 256, 1024] {
        let opts = MeanOptions {
            quadrature_points: n,
            ..Default::default()
        };
        group.bench_with_input(BenchmarkId::new("skew_lebesgue", n), &opts, |b, o| {
            b.iter(|| mean_translation_number(&a, &g, &mu, o).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, local, mean);
criterion_main!(benches);
