//! Concrete targets: one-dimensional benchmarks, TV image deconvolution and
//! nuclear-norm matrix denoising.

pub mod benchmark;
pub mod deconv;
pub mod lowrank;
pub mod map;
pub mod synth;

pub use benchmark::{benchmark_target, Benchmark1D, BenchmarkTarget};
pub use deconv::{deconv_target, DeconvTarget, GaussianLikelihood, ImageDeconvModel};
pub use lowrank::{lowrank_target, LowRankDenoiseModel, LowRankTarget};
pub use map::{map_estimate, MapParams, MapResult};
pub use synth::{
    checkerboard, phantom, posterior_predictive_replicas, snr_db, synthesize_observation,
    NoiseSpec, Observation,
};
