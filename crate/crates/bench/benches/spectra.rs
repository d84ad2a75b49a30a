use std::f64::consts::PI;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use shapeinv_core::numerics::spectrum_numeric;
use shapeinv_core::spectra::{check_normalizable, excited_state, spectrum_analytic};
use shapeinv_core::verify::{riccati_suite, shape_suite};
use shapeinv_core::{ChainDirection, FreeConstants, Grid, Preset, Superpotential};

fn trig() -> shapeinv_core::Family {
    Preset::TypeA.family(&FreeConstants::default()).unwrap()
}

fn numeric(c: &mut Criterion) {
    let mut group = c.benchmark_group("spectrum_numeric");
    for n in [1001, 2001, 4001] {
        let grid = Grid::new(1e-3, PI - 1e-3, n).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &grid, |b, g| {
            b.iter(|| spectrum_numeric(&|x| Ok(6.0 / (x.sin() * x.sin()) - 4.0), g, 3).unwrap())
        });
    }
    group.finish();
}

fn analytic(c: &mut Criterion) {
    let f = trig();
    let grid = Grid::new(1e-3, PI - 1e-3, 4001).unwrap();
    let w = Superpotential::Family(f);
    c.bench_function("spectrum_analytic/kmax8", |b| {
        b.iter(|| spectrum_analytic(&f, 2.0, 8, ChainDirection::DecreasingL, 0.0, Some((grid.x0(), grid.x1()))).unwrap())
    });
    c.bench_function("check_normalizable", |b| {
        b.iter(|| check_normalizable(&w, 2.0, ChainDirection::DecreasingL, (grid.x0(), grid.x1())).unwrap())
    });
    let mut group = c.benchmark_group("excited_state");
    for k in [0, 2, 4] {
        group.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, &k| {
            b.iter(|| excited_state(&f, 2.0, k, ChainDirection::DecreasingL, &grid).unwrap())
        });
    }
    group.finish();
}

fn suites(c: &mut Criterion) {
    let mut group = c.benchmark_group("suites");
    group.sample_size(10);
    group.bench_function("riccati", |b| b.iter(|| riccati_suite(1, 60, 50)));
    group.bench_function("shape", |b| b.iter(|| shape_suite(50)));
    group.finish();
}

criterion_group!(benches, numeric, analytic, suites);
criterion_main!(benches);
