use std::time::Duration;

use serde::Serialize;

use proxmcmc::diagnostics::{acf_csv, time_normalized_ess, wasserstein1};
use proxmcmc::io::matrix_to_csv;
use proxmcmc::linalg::singular_values;
use proxmcmc::models::{
    checkerboard, posterior_predictive_replicas, snr_db, synthesize_observation, NoiseSpec,
};
use proxmcmc::rng::{chain_rng, fill_standard_normal};
use proxmcmc::{lowrank_target, Grid, LowRankDenoiseModel, SamplerKind};

use super::{chain_config, sampler_list, DATA_STREAM, REPLICA_STREAM};
use crate::chain::{acf_of, drive, ess_of, Budget, DriveOptions};
use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Csv, OutputDir};

#[derive(Clone, Debug, Serialize)]
pub struct MapSummary {
    pub mse_truth: f64,
    pub mse_observation: f64,
    pub rank: usize,
    pub observation_rank: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainSummary {
    pub sampler: String,
    pub delta_final: f64,
    pub acceptance_rate: Option<f64>,
    pub burn_in_acceptance_rate: Option<f64>,
    pub stored: usize,
    pub ess: Option<f64>,
    pub ess_per_sample: Option<f64>,
    pub acf: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReplicaSummary {
    pub index: usize,
    pub w1_to_observation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LowRankReport {
    pub sigma2: f64,
    pub alpha: f64,
    pub snr_db: f64,
    pub map: MapSummary,
    pub chains: Vec<ChainSummary>,
    pub replicas: Vec<ReplicaSummary>,
    /// Distance from a pure-noise matrix to the observation.
    pub w1_noise_to_observation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainTiming {
    pub sampler: String,
    pub wall_time: f64,
    pub kernel_steps: usize,
    pub ess_per_second: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LowRankTiming {
    pub chains: Vec<ChainTiming>,
}

fn mse(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64
}

fn rank(m: &Grid) -> CliResult<usize> {
    let sv = singular_values(m)?;
    let tol = sv.first().copied().unwrap_or(0.0) * 1e-10;
    Ok(sv.iter().filter(|&&s| s > tol).count())
}

/// Denoises a checkerboard under a nuclear-norm prior: exact MAP by singular
/// value thresholding, then chains from the MAP, posterior predictive
/// replicas and a sampler comparison table.
///
/// With `rwmh_budget = wallclock`, RWMH runs for the wall time of the first
/// listed sampler instead of a fixed step count; its outputs then depend on
/// machine speed.
pub fn run(cfg: &ExperimentConfig, out: &OutputDir) -> CliResult<(LowRankReport, LowRankTiming)> {
    let truth = checkerboard(cfg.get("square")?, cfg.get("tiles")?);
    let sigma2: f64 = cfg.get("sigma2")?;
    let seed: u64 = cfg.get("seed")?;
    let obs = synthesize_observation(
        &truth,
        None,
        NoiseSpec::Variance(sigma2),
        &mut chain_rng(seed, DATA_STREAM),
    )?;
    let alpha = cfg.get::<f64>("alpha_sigma2")? / sigma2;
    let model = LowRankDenoiseModel {
        y: obs.y.clone(),
        sigma2,
        alpha,
    };
    let target = lowrank_target(&model)?;
    let map = model.map_estimate()?;
    let map_summary = MapSummary {
        mse_truth: mse(map.as_slice(), truth.as_slice()),
        mse_observation: mse(obs.y.as_slice(), truth.as_slice()),
        rank: rank(&map)?,
        observation_rank: rank(&obs.y)?,
    };
    out.text("truth.csv", &matrix_to_csv(&truth))?;
    out.text("observation.csv", &matrix_to_csv(&obs.y))?;
    out.text("map.csv", &matrix_to_csv(&map))?;

    let kinds = sampler_list(cfg)?;
    let wallclock = match cfg.raw("rwmh_budget")? {
        "steps" => false,
        "wallclock" => true,
        other => {
            return Err(CliError::usage(format!(
                "rwmh_budget must be 'steps' or 'wallclock', got '{other}'"
            )))
        }
    };
    let max_lag: usize = cfg.get("max_lag")?;
    let replica_idx: Vec<usize> = cfg.get_list("replicas")?;

    let mut chains = Vec::new();
    let mut timings = Vec::new();
    let mut replicas = Vec::new();
    let mut comparison = Csv::new(&[
        "sampler",
        "stored",
        "acceptance_rate",
        "ess",
        "ess_per_sample",
    ]);
    let mut reference_time = None;
    // Sequential on purpose: wall times are compared across samplers.
    for (i, &kind) in kinds.iter().enumerate() {
        let name = kind.name();
        let delta: f64 = if kind == SamplerKind::Rwmh {
            cfg.get("rwmh_delta")?
        } else {
            cfg.get("delta")?
        };
        let chain = chain_config(cfg, kind, delta)?;
        let budget = match (kind, wallclock, reference_time) {
            (SamplerKind::Rwmh, true, Some(t)) if i > 0 => {
                Budget::WallClock(Duration::from_secs_f64(t))
            }
            _ => Budget::Steps,
        };
        let keep = i == 0;
        let opts = DriveOptions {
            budget,
            divergence: None,
            keep_samples: keep,
        };
        let rec = drive(&target, &chain, map.as_slice(), &opts)
            .map_err(|e| CliError::failure(format!("{name}: {e}")))?;
        if let Some(f) = &rec.failure {
            return Err(CliError::failure(format!("{name}: {f}")));
        }
        if i == 0 {
            reference_time = Some(rec.wall_time);
        }
        let mut trace = Csv::new(&["sample", "log_density"]);
        for (k, v) in rec.log_density.iter().enumerate() {
            trace.row(&[Cell::I(k), Cell::F(*v)]);
        }
        out.text(&format!("trace_{name}.csv"), &trace.finish())?;
        let acf = acf_of(name, &rec.log_density, max_lag);
        if let Some(acf) = &acf {
            out.text(&format!("acf_{name}.csv"), &acf_csv(acf))?;
        }
        let ess = ess_of(name, &rec.log_density);
        let stored = rec.log_density.len();
        comparison.row(&[
            Cell::S(name),
            Cell::I(stored),
            Cell::F(rec.acceptance_rate.unwrap_or(f64::NAN)),
            Cell::F(ess.unwrap_or(f64::NAN)),
            Cell::F(ess.map_or(f64::NAN, |e| e / stored as f64)),
        ]);
        timings.push(ChainTiming {
            sampler: name.to_string(),
            wall_time: rec.wall_time,
            kernel_steps: rec.kernel_steps,
            ess_per_second: ess.and_then(|e| time_normalized_ess(e, rec.wall_time).ok()),
        });
        chains.push(ChainSummary {
            sampler: name.to_string(),
            delta_final: rec.delta_final,
            acceptance_rate: rec.acceptance_rate,
            burn_in_acceptance_rate: rec.burn_in_acceptance_rate,
            stored,
            ess,
            ess_per_sample: ess.map(|e| e / stored as f64),
            acf,
        });

        if keep {
            let valid: Vec<usize> = replica_idx
                .iter()
                .copied()
                .filter(|&t| t < rec.samples.len())
                .collect();
            let mut rng = chain_rng(seed, REPLICA_STREAM);
            let reps = posterior_predictive_replicas(
                &rec.samples,
                &valid,
                truth.shape(),
                sigma2,
                &mut rng,
            )?;
            for (t, rep) in valid.iter().zip(&reps) {
                out.text(&format!("replica_{t}.csv"), &matrix_to_csv(rep))?;
                replicas.push(ReplicaSummary {
                    index: *t,
                    w1_to_observation: wasserstein1(rep.as_slice(), obs.y.as_slice())?,
                });
            }
        }
    }

    let mut noise = vec![0.0; truth.len()];
    fill_standard_normal(&mut chain_rng(seed, REPLICA_STREAM + 1), &mut noise);
    noise.iter_mut().for_each(|v| *v *= sigma2.sqrt());
    let report = LowRankReport {
        sigma2,
        alpha,
        snr_db: snr_db(&truth, sigma2)?,
        map: map_summary,
        chains,
        replicas,
        w1_noise_to_observation: wasserstein1(&noise, obs.y.as_slice())?,
    };
    let timing = LowRankTiming { chains: timings };
    out.text("comparison.csv", &comparison.finish())?;
    out.json("summary.json", &report)?;
    out.json("timing.json", &timing)?;
    Ok((report, timing))
}
