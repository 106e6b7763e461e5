//! Proximal Markov chain Monte Carlo for log-concave densities.
//!
//! The crate provides proximity mappings of common concave log-densities,
//! their Moreau approximations, the proximal Langevin samplers P-ULA and
//! P-MALA alongside gradient-based and random-walk baselines, chain
//! diagnostics, and ready-made targets for 1-D benchmarks, total-variation
//! image deconvolution and nuclear-norm matrix denoising.
//!
//! ```
//! use proxmcmc::{benchmark_target, run_chain, Benchmark1D, ChainConfig, SamplerKind};
//!
//! let target = benchmark_target(Benchmark1D::QUARTIC, 1).unwrap();
//! let mut config = ChainConfig::new(SamplerKind::Pmala, 1.0, 500);
//! config.seed = 7;
//! let run = run_chain(&target, &config, &[10.0]).unwrap();
//! assert_eq!(run.samples.len(), 500);
//! ```
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod io;
pub mod linalg;
pub mod models;
pub mod oracle;
pub mod prox;
pub mod rng;
pub mod samplers;
pub mod splitting;
pub mod target;

pub use diagnostics::{
    autocorrelation, effective_sample_size, pixelwise_quantiles, time_normalized_ess, wasserstein1,
    CredibilityMap, ScalarSummaryTrace, TraceSummary,
};
pub use error::{Error, Result};
pub use linalg::{CircularConvolution, DiscreteGradient, Grid, LinearOperator};
pub use models::{
    benchmark_target, deconv_target, lowrank_target, map_estimate, Benchmark1D, ImageDeconvModel,
    LowRankDenoiseModel, MapParams, NoiseSpec,
};
pub use prox::{ClosedFormProx, ProxOutput, ProxStrategy, TvSolver};
pub use samplers::{
    run_chain, Adaptation, ChainConfig, ChainRun, KernelSpec, Sampler, SamplerKind,
};
pub use target::{moreau_eval, MoreauEval, Target};
