pub mod benchmark1d;
pub mod deconvolve;
pub mod denoise_lowrank;
pub mod diagnose;
pub mod prox_check;

use proxmcmc::{Adaptation, ChainConfig, KernelSpec, SamplerKind};

use crate::config::ExperimentConfig;
use crate::error::CliResult;

/// Stream reserved for synthetic data; chains use `1 + kind index`.
pub const DATA_STREAM: u64 = 0;
pub const REPLICA_STREAM: u64 = 100;

pub fn chain_stream(kind: SamplerKind) -> u64 {
    1 + SamplerKind::ALL
        .iter()
        .position(|&k| k == kind)
        .unwrap_or(0) as u64
}

/// Chain settings shared by every experiment: `burn_in`, `n_samples`,
/// `thinning`, `seed`, `adapt`, `band_lo`, `band_hi`.
pub fn chain_config(
    cfg: &ExperimentConfig,
    kind: SamplerKind,
    delta: f64,
) -> CliResult<ChainConfig> {
    let adaptation = if cfg.get::<bool>("adapt")? {
        Some(Adaptation {
            lo: cfg.get("band_lo")?,
            hi: cfg.get("band_hi")?,
            ..Adaptation::default()
        })
    } else {
        None
    };
    let chain = ChainConfig {
        kernel: KernelSpec::new(kind),
        delta,
        n_samples: cfg.get("n_samples")?,
        burn_in: cfg.get("burn_in")?,
        thinning: cfg.get("thinning")?,
        seed: cfg.get("seed")?,
        stream: chain_stream(kind),
        adaptation,
        record_transitions: false,
    };
    Ok(chain)
}

pub fn sampler_list(cfg: &ExperimentConfig) -> CliResult<Vec<SamplerKind>> {
    let kinds: Vec<SamplerKind> = cfg.get_list("samplers")?;
    if kinds.is_empty() {
        return Err(crate::error::CliError::usage(
            "at least one sampler is required",
        ));
    }
    Ok(kinds)
}
