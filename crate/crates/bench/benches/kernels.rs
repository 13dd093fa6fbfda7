use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use cellfree_core::analysis::{lambert_w, optimal_lambda};
use cellfree_core::harness::{evaluate_layout, ExperimentConfig};
use cellfree_core::networking::{ucr_apsel, NetworkingContext};
use cellfree_core::scenario::{
    channel_matrix, large_scale_matrix, sample_deployment, sample_small_scale, ChannelParams,
};
use cellfree_core::transmission::zf_precoders;

fn gains(k: usize, l: usize) -> cellfree_core::GainMatrix {
    let dep = sample_deployment(k, l, 1000.0, 42).unwrap();
    large_scale_matrix(&dep, &ChannelParams::default(), 0).unwrap()
}

fn networking(c: &mut Criterion) {
    let g = gains(100, 200);
    c.bench_function("ucr_apsel K=100 L=200 M=4 cold", |b| {
        b.iter(|| ucr_apsel(black_box(&g), 4, 1.5).unwrap())
    });
    let ctx = NetworkingContext::new(&g);
    ctx.ucr_apsel(4, 1.5).unwrap();
    c.bench_function("ucr_apsel K=100 L=200 M=4 cached", |b| {
        b.iter(|| ctx.ucr_apsel(black_box(4), 1.3).unwrap())
    });
}

fn precoding(c: &mut Criterion) {
    let g = gains(25, 40);
    let h = sample_small_scale(25, 40, 1, 1).unwrap().remove(0);
    let ch = channel_matrix(&g, &h).unwrap();
    c.bench_function("zf_precoders 25x40", |b| {
        b.iter(|| zf_precoders(black_box(&ch)).unwrap())
    });
}

fn analysis(c: &mut Criterion) {
    c.bench_function("lambert_w(1613.9)", |b| {
        b.iter(|| lambert_w(black_box(1613.9)).unwrap())
    });
    c.bench_function("optimal_lambda(1000, 3)", |b| {
        b.iter(|| optimal_lambda(black_box(1000), 3).unwrap())
    });
}

fn layout(c: &mut Criterion) {
    let cfg = ExperimentConfig {
        n_fading_draws: 5,
        ..Default::default()
    };
    let mut group = c.benchmark_group("layout");
    group.sample_size(10);
    group.bench_function("ucr_apsel K=100 L=200 M=4, 5 draws", |b| {
        b.iter(|| evaluate_layout(std::slice::from_ref(&cfg), black_box(0)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, networking, precoding, analysis, layout);
criterion_main!(benches);
