use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use proxmcmc::diagnostics::{acf_csv, quantile_sorted};
use proxmcmc::io::{matrix_to_csv, read_pgm, BitDepth};
use proxmcmc::linalg::uniform_kernel;
use proxmcmc::models::{phantom, synthesize_observation, NoiseSpec};
use proxmcmc::rng::chain_rng;
use proxmcmc::{
    deconv_target, map_estimate, CredibilityMap, DiscreteGradient, Grid, ImageDeconvModel,
    MapParams, TvSolver,
};

use super::{chain_config, sampler_list, DATA_STREAM};
use crate::chain::{acf_of, drive, ess_of, Budget, DriveOptions};
use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Csv, OutputDir};

#[derive(Clone, Debug, Serialize)]
pub struct MapSummary {
    pub iterations: usize,
    pub converged: bool,
    pub monotone: bool,
    pub objective: f64,
    pub mse_truth: f64,
    pub mse_observation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainSummary {
    pub sampler: String,
    pub delta_final: f64,
    pub acceptance_rate: Option<f64>,
    pub burn_in_acceptance_rate: Option<f64>,
    pub stored: usize,
    pub ess: Option<f64>,
    pub acf: Option<Vec<f64>>,
    pub width_edge_mean: Option<f64>,
    pub width_flat_mean: Option<f64>,
    pub width_max: Option<f64>,
    pub prox_nonconverged: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeconvReport {
    pub rows: usize,
    pub cols: usize,
    pub sigma2: f64,
    pub alpha: f64,
    pub edge_pixels: usize,
    pub map: MapSummary,
    pub chains: Vec<ChainSummary>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeconvTiming {
    pub map_seconds: f64,
    pub chains: Vec<(String, f64)>,
}

fn mse(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64
}

/// Pixels whose anisotropic gradient magnitude exceeds its 90th percentile.
pub fn edge_mask(truth: &Grid) -> CliResult<Vec<bool>> {
    let op = DiscreteGradient::new(truth.rows(), truth.cols())?;
    let g = op.gradient(truth.as_slice());
    let n = truth.len();
    let mag: Vec<f64> = (0..n).map(|i| g[i].abs() + g[n + i].abs()).collect();
    let mut sorted = mag.clone();
    sorted.sort_by(f64::total_cmp);
    let thr = quantile_sorted(&sorted, 0.9);
    Ok(mag.iter().map(|&m| m > thr).collect())
}

fn masked_means(width: &[f64], mask: &[bool]) -> (Option<f64>, Option<f64>) {
    let mean = |want: bool| {
        let v: Vec<f64> = width
            .iter()
            .zip(mask)
            .filter(|(_, &m)| m == want)
            .map(|(w, _)| *w)
            .collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    };
    (mean(true), mean(false))
}

fn load_truth(cfg: &ExperimentConfig) -> CliResult<Grid> {
    match cfg.raw("image")? {
        "phantom" => Ok(phantom(cfg.get("size")?)),
        path => Ok(read_pgm(Path::new(path))?.0),
    }
}

/// Synthesises a blurred noisy observation, computes the MAP estimate and
/// runs each sampler from it, writing images, credibility maps and chain
/// diagnostics.
pub fn run(cfg: &ExperimentConfig, out: &OutputDir) -> CliResult<(DeconvReport, DeconvTiming)> {
    let truth = load_truth(cfg)?;
    let kernel = uniform_kernel(cfg.get("kernel_size")?);
    let seed: u64 = cfg.get("seed")?;
    let obs = synthesize_observation(
        &truth,
        Some(&kernel),
        NoiseSpec::BsnrDb(cfg.get("bsnr_db")?),
        &mut chain_rng(seed, DATA_STREAM),
    )?;
    let alpha: f64 = cfg.get("alpha")?;
    let tv = TvSolver {
        step: cfg.get("tv_step")?,
        max_iters: cfg.get("tv_max_iters")?,
        tolerance: cfg.get("tv_tolerance")?,
        hot_start: true,
    };
    let model = ImageDeconvModel {
        y: obs.y.clone(),
        kernel,
        sigma2: obs.sigma2,
        alpha,
        tv,
    };
    let map_model = ImageDeconvModel {
        tv: TvSolver {
            max_iters: cfg.get("map_tv_max_iters")?,
            tolerance: cfg.get("map_tv_tolerance")?,
            ..tv
        },
        ..model.clone()
    };

    let started = Instant::now();
    let map_target = deconv_target(&map_model)?;
    let params = MapParams {
        step: obs.sigma2,
        max_iters: cfg.get("map_max_iters")?,
        rel_tol: cfg.get("map_tolerance")?,
    };
    let map = map_estimate(&map_target, obs.y.as_slice(), &params)?;
    let map_seconds = started.elapsed().as_secs_f64();
    let map_grid = obs.y.with_data(map.x.clone())?;
    let map_summary = MapSummary {
        iterations: map.iterations,
        converged: map.converged,
        monotone: map.objective_trace.windows(2).all(|w| w[1] >= w[0]),
        objective: *map.objective_trace.last().unwrap_or(&f64::NAN),
        mse_truth: mse(&map.x, truth.as_slice()),
        mse_observation: mse(obs.y.as_slice(), truth.as_slice()),
    };

    let (lo, hi) = (0.0, 255.0);
    out.pgm("truth.pgm", &truth, lo, hi, BitDepth::Eight)?;
    out.pgm("observation.pgm", &obs.y, lo, hi, BitDepth::Eight)?;
    out.pgm("map.pgm", &map_grid, lo, hi, BitDepth::Eight)?;
    out.text("observation.csv", &matrix_to_csv(&obs.y))?;
    out.text("map.csv", &matrix_to_csv(&map_grid))?;
    let mut obj = Csv::new(&["iteration", "objective"]);
    for (i, v) in map.objective_trace.iter().enumerate() {
        obj.row(&[Cell::I(i), Cell::F(*v)]);
    }
    out.text("map_objective.csv", &obj.finish())?;

    let target = deconv_target(&model)?;
    let mask = edge_mask(&truth)?;
    let kinds = sampler_list(cfg)?;
    let delta: f64 = cfg.get("delta")?;
    let max_lag: usize = cfg.get("max_lag")?;
    let configs = kinds
        .iter()
        .map(|&k| chain_config(cfg, k, delta))
        .collect::<CliResult<Vec<_>>>()?;
    let opts = DriveOptions {
        budget: Budget::Steps,
        divergence: None,
        keep_samples: true,
    };
    let runs: Vec<_> = configs
        .par_iter()
        .map(|c| drive(&target, c, &map.x, &opts))
        .collect();

    let mut chains = Vec::new();
    let mut timing = Vec::new();
    for (kind, run) in kinds.iter().zip(runs) {
        let name = kind.name();
        let rec = run.map_err(|e| CliError::failure(format!("{name}: {e}")))?;
        if let Some(f) = &rec.failure {
            return Err(CliError::failure(format!("{name}: {f}")));
        }
        let mut trace = Csv::new(&["sample", "log_density"]);
        for (i, v) in rec.log_density.iter().enumerate() {
            trace.row(&[Cell::I(i), Cell::F(*v)]);
        }
        out.text(&format!("trace_{name}.csv"), &trace.finish())?;
        let acf = acf_of(name, &rec.log_density, max_lag);
        if let Some(acf) = &acf {
            out.text(&format!("acf_{name}.csv"), &acf_csv(acf))?;
        }
        let (mut edge, mut flat, mut width_max) = (None, None, None);
        if let Ok(cm) = CredibilityMap::from_samples(&rec.samples, 0.05, 0.95) {
            let width = truth.with_data(cm.width.clone())?;
            let top = cm.width.iter().cloned().fold(0.0, f64::max);
            out.text(&format!("credibility_{name}.csv"), &matrix_to_csv(&width))?;
            out.pgm(
                &format!("credibility_{name}.pgm"),
                &width,
                0.0,
                if top > 0.0 { top } else { 1.0 },
                BitDepth::Sixteen,
            )?;
            (edge, flat) = masked_means(&cm.width, &mask);
            width_max = Some(top);
        }
        chains.push(ChainSummary {
            sampler: name.to_string(),
            delta_final: rec.delta_final,
            acceptance_rate: rec.acceptance_rate,
            burn_in_acceptance_rate: rec.burn_in_acceptance_rate,
            stored: rec.log_density.len(),
            ess: ess_of(name, &rec.log_density),
            acf,
            width_edge_mean: edge,
            width_flat_mean: flat,
            width_max,
            prox_nonconverged: rec.prox_nonconverged,
        });
        timing.push((name.to_string(), rec.wall_time));
    }

    let report = DeconvReport {
        rows: truth.rows(),
        cols: truth.cols(),
        sigma2: obs.sigma2,
        alpha,
        edge_pixels: mask.iter().filter(|&&m| m).count(),
        map: map_summary,
        chains,
    };
    let timing = DeconvTiming {
        map_seconds,
        chains: timing,
    };
    out.json("summary.json", &report)?;
    out.json("timing.json", &timing)?;
    Ok((report, timing))
}
