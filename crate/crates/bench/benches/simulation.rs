use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};
use kbest_core::montecarlo::{estimate, run_trial, select_kth_largest, trial_rng};
use kbest_core::presets::base_params;
use kbest_core::{Metric, StPower};
use std::hint::black_box;

fn trials(c: &mut Criterion) {
    let mut g = c.benchmark_group("trial");
    for n in [40u32, 200] {
        let p = base_params(n, 2, StPower::Limited(10.0));
        g.throughput(Throughput::Elements(u64::from(n)));
        g.bench_function(format!("run_trial N={n}"), |b| {
            let mut i = 0u64;
            b.iter(|| {
                i += 1;
                run_trial(black_box(&p), None, &mut trial_rng(1, i))
            })
        });
    }
    g.finish();

    let p = base_params(100, 1, StPower::Unlimited);
    let mut g = c.benchmark_group("estimate");
    g.sample_size(10);
    g.bench_function("avg_throughput N=100, 10^4 trials", |b| {
        b.iter(|| estimate(&Metric::AvgThroughput, black_box(&p), None, 10_000, 3))
    });
    g.finish();
}

fn selection(c: &mut Criterion) {
    let data: Vec<f64> = (0..1000u32).map(|i| f64::from(i.wrapping_mul(2_654_435_761) % 10_007)).collect();
    c.bench_function("select 3rd largest of 1000", |b| {
        b.iter_batched_ref(|| data.clone(), |v| select_kth_largest(v, 3), BatchSize::SmallInput)
    });
}

criterion_group!(benches, trials, selection);
criterion_main!(benches);
