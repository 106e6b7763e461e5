use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use proxmcmc::linalg::uniform_kernel;
use proxmcmc::models::{checkerboard, phantom, synthesize_observation, NoiseSpec};
use proxmcmc::prox::{prox_nuclear_svt, prox_quartic_1d, prox_soft_threshold, prox_tv};
use proxmcmc::rng::chain_rng;
use proxmcmc::{
    deconv_target, lowrank_target, ChainConfig, DiscreteGradient, ImageDeconvModel,
    LowRankDenoiseModel, Sampler, SamplerKind, TvSolver,
};

fn scalar_proxes(c: &mut Criterion) {
    let x: Vec<f64> = (0..4096).map(|i| (i as f64 * 0.37).sin() * 4.0).collect();
    c.bench_function("soft_threshold_4096", |b| {
        b.iter(|| prox_soft_threshold(black_box(&x), 0.5, 1.0).unwrap())
    });
    c.bench_function("quartic_cubic_root", |b| {
        b.iter(|| prox_quartic_1d(black_box(3.7), 0.5).unwrap())
    });
}

fn matrix_proxes(c: &mut Criterion) {
    let m = checkerboard(8, 8).map(|v| v + 0.1);
    c.bench_function("svt_64x64", |b| {
        b.iter(|| prox_nuclear_svt(black_box(&m), 0.3).unwrap())
    });
    let img = phantom(64);
    let op = DiscreteGradient::new(64, 64).unwrap();
    let solver = TvSolver::default();
    c.bench_function("tv_prox_64x64", |b| {
        b.iter(|| prox_tv(black_box(img.as_slice()), &op, 0.5, 0.05, &solver, None).unwrap())
    });
}

fn sampler_steps(c: &mut Criterion) {
    let truth = phantom(64);
    let k = uniform_kernel(9);
    let obs = synthesize_observation(
        &truth,
        Some(&k),
        NoiseSpec::BsnrDb(40.0),
        &mut chain_rng(0, 0),
    )
    .unwrap();
    let model = ImageDeconvModel {
        y: obs.y.clone(),
        kernel: k,
        sigma2: obs.sigma2,
        alpha: 0.05,
        tv: TvSolver::default(),
    };
    let target = deconv_target(&model).unwrap();
    let mut pmala = Sampler::new(
        &target,
        ChainConfig::new(SamplerKind::Pmala, 0.4, 1),
        obs.y.as_slice(),
    )
    .unwrap();
    c.bench_function("pmala_step_deconv_64x64", |b| {
        b.iter(|| pmala.step().unwrap())
    });

    let noisy = synthesize_observation(
        &checkerboard(8, 8),
        None,
        NoiseSpec::Variance(0.01),
        &mut chain_rng(0, 0),
    )
    .unwrap();
    let lr = LowRankDenoiseModel {
        y: noisy.y.clone(),
        sigma2: 0.01,
        alpha: 115.0,
    };
    let target = lowrank_target(&lr).unwrap();
    let start = lr.map_estimate().unwrap();
    let mut pmala = Sampler::new(
        &target,
        ChainConfig::new(SamplerKind::Pmala, 1e-4, 1),
        start.as_slice(),
    )
    .unwrap();
    c.bench_function("pmala_step_lowrank_64x64", |b| {
        b.iter(|| pmala.step().unwrap())
    });
    let mut rwmh = Sampler::new(
        &target,
        ChainConfig::new(SamplerKind::Rwmh, 3e-7, 1),
        start.as_slice(),
    )
    .unwrap();
    c.bench_function("rwmh_step_lowrank_64x64", |b| {
        b.iter(|| rwmh.step().unwrap())
    });
}

criterion_group!(benches, scalar_proxes, matrix_proxes, sampler_steps);
criterion_main!(benches);
