use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use transnum::galkedra::{gal_kedra, gal_kedra_quadrature};
use transnum::{CohomologyClass, LiftedMap, TorusPoint};

fn cocycle(c: &mut Criterion) {
    let a = CohomologyClass::integer(&[1, 0]).unwrap();
    let g = LiftedMap::sinusoidal_shear(0.1).unwrap();
    let h = LiftedMap::rotation(&[0.1, 0.25]).unwrap();
    let x = TorusPoint::new(&[0.2, 0.3]);
    c.bench_function("gal_kedra/closed_form", |b| {
        b.iter(|| gal_kedra(&a, &g, &h, &x).unwrap())
    });
    let mut group = c.benchmark_group("gal_kedra/quadrature");
    for n in [100usize, 10_000] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| gal_kedra_quadrature(&a, &g, &h, &x, n).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, cocycle);
criterion_main!(benches);
