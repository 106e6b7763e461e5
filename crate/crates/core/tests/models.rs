use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use proxmcmc::linalg::{singular_values, Grid};
use proxmcmc::models::{
    checkerboard, posterior_predictive_replicas, synthesize_observation, NoiseSpec,
};
use proxmcmc::oracle::brute_force_nuclear_prox;
use proxmcmc::rng::chain_rng;
use proxmcmc::{lowrank_target, run_chain, ChainConfig, LowRankDenoiseModel, SamplerKind, Target};

fn rank(m: &Grid) -> usize {
    singular_values(m)
        .unwrap()
        .iter()
        .filter(|&&s| s > 1e-6)
        .count()
}

fn mse(a: &Grid, b: &Grid) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        / a.len() as f64
}

fn checkerboard_model(seed: u64) -> (Grid, LowRankDenoiseModel) {
    let truth = checkerboard(8, 8);
    let obs = synthesize_observation(
        &truth,
        None,
        NoiseSpec::Variance(0.01),
        &mut chain_rng(seed, 0),
    )
    .unwrap();
    (
        truth,
        LowRankDenoiseModel {
            y: obs.y,
            sigma2: 0.01,
            alpha: 1.15 / 0.01,
        },
    )
}

#[test]
fn nuclear_prox_matches_its_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(201);
    for _ in 0..20 {
        let (r, c) = (rng.random_range(2..4), rng.random_range(2..4));
        let y = Grid::from_fn(r, c, |_, _| rng.random_range(-1.5..1.5));
        let x = Grid::from_fn(r, c, |_, _| rng.random_range(-1.5..1.5));
        let (delta, alpha, sigma2) = (
            rng.random_range(0.05..1.0),
            rng.random_range(0.2..3.0),
            rng.random_range(0.05..1.0),
        );
        let model = LowRankDenoiseModel {
            y: y.clone(),
            sigma2,
            alpha,
        };
        let got = lowrank_target(&model)
            .unwrap()
            .prox(x.as_slice(), delta / 2.0, None)
            .unwrap()
            .point;
        let want = brute_force_nuclear_prox(&[(1.0 / sigma2, &y), (2.0 / delta, &x)], alpha);
        for (a, b) in got.iter().zip(want.as_slice()) {
            assert!((a - b).abs() < 1e-3, "{a} vs {b}");
        }
    }
}

#[test]
fn map_rank_never_exceeds_observation_rank() {
    for seed in 0..10 {
        let (truth, model) = checkerboard_model(seed);
        let map = model.map_estimate().unwrap();
        assert!(rank(&map) <= rank(&model.y));
        assert!(mse(&map, &truth) < mse(&model.y, &truth));
    }
}

#[test]
#[ignore = "rank-2 recovery at this noise level is not attainable: noise singular values exceed the threshold"]
fn map_recovers_rank_two_on_most_seeds() {
    let hits = (0..10)
        .filter(|&seed| rank(&checkerboard_model(seed).1.map_estimate().unwrap()) == 2)
        .count();
    assert!(hits >= 8, "rank 2 on {hits} of 10 seeds");
}

#[test]
fn replicas_spread_around_posterior_samples() {
    let (_, model) = checkerboard_model(3);
    let small = LowRankDenoiseModel {
        y: Grid::from_fn(8, 8, |r, c| model.y.get(r, c)),
        ..model
    };
    let target = lowrank_target(&small).unwrap();
    let mut cfg = ChainConfig::new(SamplerKind::Pmala, 0.002, 50);
    cfg.seed = 4;
    let map = small.map_estimate().unwrap();
    let run = run_chain(&target, &cfg, map.as_slice()).unwrap();
    let idx: Vec<usize> = (0..50).collect();
    let reps = posterior_predictive_replicas(
        &run.samples,
        &idx,
        (8, 8),
        small.sigma2,
        &mut chain_rng(5, 0),
    )
    .unwrap();
    let resid: f64 = reps
        .iter()
        .zip(&run.samples)
        .map(|(r, s)| {
            r.as_slice()
                .iter()
                .zip(s)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
        })
        .sum::<f64>()
        / (50.0 * 64.0);
    assert!((resid / small.sigma2 - 1.0).abs() < 0.05, "{resid}");
}
