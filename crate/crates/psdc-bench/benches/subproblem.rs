//! Inner dual solver on one convex subproblem, cold start vs warm start.

use criterion::{criterion_group, criterion_main, Criterion};
use ndarray::Array1;
use std::hint::black_box;

use psdc::decomp::hdpsdc;
use psdc::fdpg::{fdpg_solve, spectral_norm, warm_start, SubproblemSpec};
use psdc_bench::mvsk_instance;

fn bench_inner(c: &mut Criterion) {
    let (f, p) = mvsk_instance(10, 200, 23);
    let dc = hdpsdc(&f).unwrap();
    let (a_plus, b_plus, powers) = dc.stacked_plus();
    let rho = spectral_norm(a_plus.view());
    let dc = dc.with_rho(rho);
    let x = Array1::from_elem(10, 0.1);
    let grad = dc.grad_h(x.view());
    let sigma = spectral_norm(a_plus.view());
    let lipschitz = (1.01 * sigma).powi(2) / rho;
    let spec = SubproblemSpec {
        a_plus: a_plus.view(),
        b_plus: b_plus.view(),
        powers: &powers,
        rho,
        c: grad,
        polyhedron: &p,
        lipschitz,
    };
    let cold = Array1::zeros(powers.len());
    let warm = warm_start(a_plus.view(), b_plus.view(), &powers, x.view());

    let mut group = c.benchmark_group("fdpg");
    group.bench_function("cold_start", |b| {
        b.iter(|| fdpg_solve(black_box(&spec), cold.view(), 5e-5, 20_000).unwrap())
    });
    group.bench_function("warm_start", |b| {
        b.iter(|| fdpg_solve(black_box(&spec), warm.view(), 5e-5, 20_000).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_inner);
criterion_main!(benches);
