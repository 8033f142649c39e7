use criterion::{criterion_group, criterion_main, Criterion};
use kbest_core::asymptotics::{avg_ber, avg_throughput, eff_throughput, outage};
use kbest_core::presets::{base_params, db};
use kbest_core::specfun::{bessel_k, integrate, upper_inc_gamma_reg, QuadratureSpec};
use kbest_core::StPower;
use std::hint::black_box;

fn special_functions(c: &mut Criterion) {
    c.bench_function("bessel_k(3, 2.5)", |b| b.iter(|| bessel_k(3, black_box(2.5))));
    c.bench_function("Q(2.5, 7)", |b| b.iter(|| upper_inc_gamma_reg(2.5, black_box(7.0))));
    let spec = QuadratureSpec::default();
    c.bench_function("integrate e^-x/(1+x) on [0, inf)", |b| {
        b.iter(|| integrate(|x| (-x).exp() / (1.0 + x), 0.0, f64::INFINITY, black_box(&spec)))
    });
}

fn asymptotics(c: &mut Criterion) {
    let lim = base_params(100, 2, StPower::Limited(db(5.0)));
    c.bench_function("avg_throughput limited", |b| b.iter(|| avg_throughput(black_box(&lim))));
    c.bench_function("eff_throughput limited", |b| b.iter(|| eff_throughput(black_box(&lim), 0.5)));
    c.bench_function("avg_ber limited", |b| b.iter(|| avg_ber(black_box(&lim), 0.5, 0.5)));
    c.bench_function("outage limited", |b| b.iter(|| outage(black_box(&lim), db(13.0))));
}

criterion_group!(benches, special_functions, asymptotics);
criterion_main!(benches);
