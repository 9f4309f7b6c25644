use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use packet_purity::oracle::{
    epsilon_sq_quadrature_with, mc_overlap_i2_i3, overlap_i1_with, shell_purity,
    shell_sector_decompose, RadialGridSpec,
};
use packet_purity::{epsilon_sq, purity, CollisionConfig, PhaseShiftModel};

fn setup() -> (CollisionConfig, PhaseShiftModel) {
    (
        CollisionConfig::new(0.01, 1.0, 10.0, 0.0).unwrap(),
        PhaseShiftModel::hard_sphere(1.0).unwrap(),
    )
}

fn closed_forms(c: &mut Criterion) {
    let (cfg, model) = setup();
    let well = PhaseShiftModel::square_well(13.154867385883, 5.0).unwrap();
    c.bench_function("epsilon_sq/hard_sphere", |b| b.iter(|| epsilon_sq(black_box(&cfg), &model)));
    c.bench_function("epsilon_sq/square_well", |b| b.iter(|| epsilon_sq(black_box(&cfg), &well)));
    c.bench_function("purity/hard_sphere", |b| b.iter(|| purity(black_box(&cfg), &model)));
}

fn quadrature(c: &mut Criterion) {
    let (cfg, model) = setup();
    c.bench_function("epsilon_sq_quadrature/n200", |b| {
        b.iter(|| epsilon_sq_quadrature_with(black_box(&cfg), &model, 200))
    });
    c.bench_function("overlap_i1/n100", |b| b.iter(|| overlap_i1_with(black_box(&cfg), &model, 100, 100)));
}

fn monte_carlo(c: &mut Criterion) {
    let (cfg, model) = setup();
    let mut group = c.benchmark_group("mc");
    group.sample_size(10);
    group.bench_function("i2_i3/100k", |b| b.iter(|| mc_overlap_i2_i3(black_box(&cfg), &model, 100_000, 42)));
    group.finish();
}

fn shell(c: &mut Criterion) {
    let (cfg, model) = setup();
    let cfg = cfg.with_sigma0(0.08).unwrap();
    let spec = RadialGridSpec {
        n_radial: 80,
        n_angular: 80,
        ..RadialGridSpec::default()
    };
    let mut group = c.benchmark_group("shell");
    group.sample_size(10);
    group.bench_function("decompose_and_purity/80x80", |b| {
        b.iter(|| {
            let d = shell_sector_decompose(black_box(&cfg), &model, 88, &spec).unwrap();
            shell_purity(&d)
        })
    });
    group.finish();
}

criterion_group!(benches, closed_forms, quadrature, monte_carlo, shell);
criterion_main!(benches);
