use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use logmetric::{
    eccentricity, four_point_delta, four_point_delta_fixed_base, intersect_balls, log_transform,
    quasi_ball_defect, sample_lens, square_grid, ultrametric_delta, BallSpec, FiniteMetricSpace,
};
use std::hint::black_box;

fn grid(side: usize) -> FiniteMetricSpace {
    log_transform(&FiniteMetricSpace::from_cloud(square_grid(side, 1.0).unwrap()))
}

fn delta(c: &mut Criterion) {
    let mut g = c.benchmark_group("four_point_delta");
    g.sample_size(10);
    for side in [4, 6, 8] {
        let space = grid(side);
        g.bench_with_input(BenchmarkId::new("full", side * side), &space, |b, s| {
            b.iter(|| four_point_delta(black_box(s)))
        });
    }
    for side in [8, 16] {
        let space = grid(side);
        g.bench_with_input(BenchmarkId::new("fixed_base", side * side), &space, |b, s| {
            b.iter(|| four_point_delta_fixed_base(black_box(s), 0))
        });
    }
    g.finish();
}

fn ultra(c: &mut Criterion) {
    let mut g = c.benchmark_group("ultrametric_delta");
    for side in [6, 10, 14] {
        let space = grid(side);
        g.bench_with_input(BenchmarkId::from_parameter(side * side), &space, |b, s| {
            b.iter(|| ultrametric_delta(black_box(s)))
        });
    }
    g.finish();
}

fn balls(c: &mut Criterion) {
    let space = grid(16);
    let region = intersect_balls(
        &space,
        BallSpec::new(0, 2.5).unwrap(),
        BallSpec::new(255, 2.5).unwrap(),
    )
    .unwrap();
    c.bench_function("eccentricity/grid256", |b| {
        b.iter(|| eccentricity(black_box(&space), black_box(&region)).unwrap())
    });
    c.bench_function("quasi_ball_defect/grid256", |b| {
        b.iter(|| quasi_ball_defect(black_box(&space), black_box(&region)).unwrap())
    });
}

fn lens(c: &mut Criterion) {
    let mut g = c.benchmark_group("lens_eccentricity");
    g.sample_size(10);
    for n in [4u32, 12] {
        let sample = sample_lens(n, 0.1).unwrap();
        let space = sample.space(false);
        g.bench_with_input(BenchmarkId::from_parameter(n), &space, |b, s| {
            b.iter(|| eccentricity(black_box(s), &sample.region).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, delta, ultra, balls, lens);
criterion_main!(benches);
