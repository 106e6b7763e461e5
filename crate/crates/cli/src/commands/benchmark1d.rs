use rayon::prelude::*;
use serde::Serialize;

use proxmcmc::{benchmark_target, Benchmark1D, SamplerKind};

use super::{chain_config, sampler_list};
use crate::chain::{drive, ess_of, Budget, DriveOptions};
use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Csv, OutputDir};

#[derive(Clone, Debug, Serialize)]
pub struct SamplerSummary {
    pub sampler: String,
    pub benchmark: String,
    pub delta_initial: f64,
    pub delta_final: f64,
    pub initial: f64,
    pub stored: usize,
    pub acceptance_rate: Option<f64>,
    pub ess: Option<f64>,
    pub all_finite: bool,
    pub min_abs_state: Option<f64>,
    pub diverged: bool,
    pub diverged_at: Option<usize>,
    pub failure: Option<String>,
}

/// Runs each sampler on a one-dimensional benchmark and writes
/// `trace_<sampler>.csv` and `summary_<sampler>.json`.
pub fn run(cfg: &ExperimentConfig, out: &OutputDir) -> CliResult<Vec<SamplerSummary>> {
    let spec: Benchmark1D = cfg.get("benchmark")?;
    let target = benchmark_target(spec, 1)?;
    let kinds = sampler_list(cfg)?;
    let delta: f64 = cfg.get("delta")?;
    let initial: f64 = cfg.get("initial")?;
    let threshold: f64 = cfg.get("divergence_threshold")?;
    let clamp: Option<f64> = cfg.get_opt("drift_clamp")?;
    let eps1: f64 = cfg.get("eps1")?;
    let eps2: f64 = cfg.get("eps2")?;

    let mut configs = Vec::new();
    for &kind in &kinds {
        let mut chain = chain_config(cfg, kind, delta)?;
        match kind {
            SamplerKind::Malta => chain.kernel.malta_eps1 = Some(eps1),
            SamplerKind::Smmala => chain.kernel.smmala_eps2 = Some(eps2),
            SamplerKind::Pula | SamplerKind::Pmala => chain.kernel.drift_clamp = clamp,
            _ => {}
        }
        configs.push(chain);
    }
    let opts = DriveOptions {
        budget: Budget::Steps,
        divergence: Some(threshold),
        keep_samples: true,
    };
    let runs: Vec<_> = configs
        .par_iter()
        .map(|c| drive(&target, c, &[initial], &opts))
        .collect();

    let mut summaries = Vec::new();
    for (kind, run) in kinds.iter().zip(runs) {
        let name = kind.name();
        let rec = run.map_err(|e| CliError::failure(format!("{name}: {e}")))?;
        let mut csv = Csv::new(&["iteration", "state", "log_density", "accepted"]);
        for i in 0..rec.iterations.len() {
            csv.row(&[
                Cell::I(rec.iterations[i]),
                Cell::F(rec.samples[i][0]),
                Cell::F(rec.log_density[i]),
                Cell::B(rec.accepted[i]),
            ]);
        }
        out.text(&format!("trace_{name}.csv"), &csv.finish())?;
        let states: Vec<f64> = rec.samples.iter().map(|s| s[0]).collect();
        let summary = SamplerSummary {
            sampler: name.to_string(),
            benchmark: spec.to_string(),
            delta_initial: delta,
            delta_final: rec.delta_final,
            initial,
            stored: states.len(),
            acceptance_rate: rec.acceptance_rate,
            ess: ess_of(name, &states),
            all_finite: states.iter().all(|v| v.is_finite()),
            min_abs_state: states.iter().map(|v| v.abs()).min_by(f64::total_cmp),
            diverged: rec.diverged_at.is_some(),
            diverged_at: rec.diverged_at,
            failure: rec.failure,
        };
        out.json(&format!("summary_{name}.json"), &summary)?;
        summaries.push(summary);
    }
    if let Some(bad) = summaries.iter().find(|s| s.failure.is_some()) {
        return Err(CliError::failure(format!(
            "sampler {} failed: {}",
            bad.sampler,
            bad.failure.as_deref().unwrap_or_default()
        )));
    }
    Ok(summaries)
}
