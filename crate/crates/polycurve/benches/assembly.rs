use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use polycurve::ktension::circle_curve;
use polycurve::variation::{hessian_matrix, HessianMode};
use polycurve::{Execution, SpaceForm};

fn hessian_assembly(c: &mut Criterion) {
    let curve = circle_curve(&SpaceForm::unit_sphere(2), 1.0, 64).expect("fixture");
    let mut group = c.benchmark_group("hessian_k2_n64");
    group.sample_size(10);
    for mode in [HessianMode::Jacobi, HessianMode::Fd] {
        for exec in [Execution::Sequential, Execution::Parallel] {
            let id = BenchmarkId::new(mode.as_str(), format!("{exec:?}").to_lowercase());
            group.bench_function(id, |b| b.iter(|| hessian_matrix(&curve, 2, mode, exec).unwrap()));
        }
    }
    group.finish();
}

criterion_group!(benches, hessian_assembly);
criterion_main!(benches);
