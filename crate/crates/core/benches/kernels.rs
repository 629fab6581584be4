use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qsieve_core::enumerate::{count_points_congruence_with, sieve_count_grid};
use qsieve_core::localdensity::{nu_brute, DensityConfig};
use qsieve_core::{ExecMode, IntegerPolynomial, QuadraticForm};

const MODES: [(&str, ExecMode); 2] = [("sequential", ExecMode::Sequential), ("parallel", ExecMode::Parallel)];

fn form() -> QuadraticForm {
    QuadraticForm::parse("x0*x1 - x2^2 - x3^2 + 2*x4^2").unwrap()
}

fn point_count(c: &mut Criterion) {
    let q = form();
    let mut group = c.benchmark_group("point_count_B40");
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| count_points_congruence_with(black_box(&q), 40, 1, &[0; 5], mode))
        });
    }
    group.finish();
}

fn sieve(c: &mut Criterion) {
    let q = form();
    let forms = vec![IntegerPolynomial::var(5, 0), IntegerPolynomial::var(5, 1)];
    let mut group = c.benchmark_group("sieve_B30");
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| sieve_count_grid(black_box(&q), &forms, 30, &[10, 20], mode).unwrap())
        });
    }
    group.finish();
}

fn residue_sweep(c: &mut Criterion) {
    let q = QuadraticForm::parse("x0^2 + x1^2 - 3*x2^2 + x3*x4").unwrap();
    let mut group = c.benchmark_group("nu_brute_7");
    group.sample_size(10);
    for (name, mode) in MODES {
        let cfg = DensityConfig { mode, ..DensityConfig::default() };
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| nu_brute(black_box(&q), 7, 2, &cfg).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, point_count, sieve, residue_sweep);
criterion_main!(benches);
