use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use loccov_core::axioms::{run_axiom_suite, Tolerances};
use loccov_core::cstar::{check_star_hom_with, StarAlgebra, StarHom};
use loccov_core::fixtures;
use loccov_core::functor_ext::{isometry_theorem_check, verify_tensor_functor, IsometryConfig};
use loccov_core::linalg::CMatrix;
use loccov_core::nets::{Axiom, NetModel};
use loccov_core::par::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn isometry_samples(c: &mut Criterion) {
    let m = Arc::new(fixtures::diamond_in_box());
    let (o1, o2, o) = fixtures::default_isometry_regions(&m).unwrap();
    let tol = Tolerances::default();
    let mut group = c.benchmark_group("isometry_box_8_samples");
    group.sample_size(10);
    for (name, exec) in MODES {
        let cfg = IsometryConfig { samples: 8, seed: 0, nested: false, exec };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| isometry_theorem_check(&NetModel::qubit(), m.clone(), &o1, &o2, &o, black_box(&cfg), &tol).unwrap())
        });
    }
    group.finish();
}

fn hom_audit(c: &mut Criterion) {
    let source = Arc::new(StarAlgebra::full(8));
    let h = StarHom::from_fn(source, 16, |x| x.kron(&CMatrix::identity(2))).unwrap();
    let mut group = c.benchmark_group("hom_audit_m8");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| check_star_hom_with(black_box(&h), exec)));
    }
    group.finish();
}

fn axiom_sweep(c: &mut Criterion) {
    let m = Arc::new(fixtures::diamond());
    let tol = Tolerances::default();
    let checks = [Axiom::Causality, Axiom::Covariance];
    let mut group = c.benchmark_group("axioms_diamond_qubit");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run_axiom_suite(&NetModel::qubit(), m.clone(), black_box(&checks), &tol, exec).unwrap())
        });
    }
    group.finish();
}

fn functor_laws(c: &mut Criterion) {
    let tol = Tolerances::default();
    let mut group = c.benchmark_group("functor_laws_trivial");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| verify_tensor_functor(black_box(&NetModel::trivial()), &tol, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, isometry_samples, hom_audit, axiom_sweep, functor_laws);
criterion_main!(benches);
