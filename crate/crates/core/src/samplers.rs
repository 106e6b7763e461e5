//! Markov chain kernels and the chain driver.
//!
//! Every kernel draws `Y ~ N(m(x), δ s(x) I)` with a kernel-specific mean
//! `m` and variance scale `s` (`s = 1` except for the one-dimensional
//! position-dependent sampler):
//!
//! | kernel | `m(x)` | adjusted |
//! |--------|--------|----------|
//! | P-ULA, P-MALA | `prox^{δ/2}_g(x)` | P-MALA |
//! | ULA, MALA | `x + (δ/2)∇g(x)` | MALA |
//! | MALTA | `x + (δ/2) ε₁∇g(x) / max(ε₁, ‖∇g(x)‖)` | yes |
//! | SMMALA (1-D) | `x + (δ/2) g'(x)/H(x)`, `s = 1/H(x)`, `H = −g'' + ε₂` | yes |
//! | RWMH | `x` | yes |
//!
//! Adjusted kernels accept with probability
//! `min(1, π(Y) q(x|Y) / π(x) q(Y|x))`. The proposal moments of the current
//! state are cached, so P-MALA evaluates one new prox per step (at the
//! proposal).

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};
use crate::linalg::dist_sq;
use crate::rng::{chain_rng, fill_standard_normal, open_unit, ChainRng};
use crate::target::{finite_gradient, Target};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    Pula,
    Pmala,
    Ula,
    Mala,
    Malta,
    Smmala,
    Rwmh,
}

impl SamplerKind {
    pub const ALL: [SamplerKind; 7] = [
        SamplerKind::Pula,
        SamplerKind::Pmala,
        SamplerKind::Ula,
        SamplerKind::Mala,
        SamplerKind::Malta,
        SamplerKind::Smmala,
        SamplerKind::Rwmh,
    ];

    /// Whether the kernel applies a Metropolis–Hastings correction.
    pub fn is_adjusted(self) -> bool {
        !matches!(self, SamplerKind::Pula | SamplerKind::Ula)
    }

    pub fn name(self) -> &'static str {
        match self {
            SamplerKind::Pula => "pula",
            SamplerKind::Pmala => "pmala",
            SamplerKind::Ula => "ula",
            SamplerKind::Mala => "mala",
            SamplerKind::Malta => "malta",
            SamplerKind::Smmala => "smmala",
            SamplerKind::Rwmh => "rwmh",
        }
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['-', '_'], "");
        SamplerKind::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .ok_or_else(|| Error::Parse(format!("unknown sampler '{s}'")))
    }
}

/// Robbins–Monro tuning of `log δ` toward an acceptance band during burn-in:
/// `log δ ← log δ + m^{−decay} (a_m − a*)`, with `a*` the band midpoint and
/// `a_m` the acceptance probability of step `m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Adaptation {
    pub lo: f64,
    pub hi: f64,
    pub decay: f64,
}

impl Default for Adaptation {
    fn default() -> Self {
        Self {
            lo: 0.4,
            hi: 0.6,
            decay: 0.6,
        }
    }
}

impl Adaptation {
    pub fn target(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.lo && self.lo <= self.hi && self.hi < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "acceptance band [{}, {}] must lie in (0, 1)",
                self.lo, self.hi
            )));
        }
        if !(self.decay > 0.5 && self.decay <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "adaptation decay {} must lie in (0.5, 1]",
                self.decay
            )));
        }
        Ok(())
    }
}

/// The kernel-defining part of a chain configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: SamplerKind,
    pub malta_eps1: Option<f64>,
    pub smmala_eps2: Option<f64>,
    /// Bounded-drift radius `R`: the prox output `p` is replaced by
    /// `x + R(p − x)/max(R, ‖p − x‖)`.
    pub drift_clamp: Option<f64>,
}

impl KernelSpec {
    pub fn new(kind: SamplerKind) -> Self {
        Self {
            kind,
            malta_eps1: None,
            smmala_eps2: None,
            drift_clamp: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match (self.kind, self.malta_eps1) {
            (SamplerKind::Malta, None) => {
                return Err(Error::InvalidParameter("MALTA needs eps1".into()))
            }
            (SamplerKind::Malta, Some(e)) => check_positive("eps1", e)?,
            (_, Some(_)) => {
                return Err(Error::InvalidParameter("eps1 is only used by MALTA".into()))
            }
            _ => {}
        }
        match (self.kind, self.smmala_eps2) {
            (SamplerKind::Smmala, None) => {
                return Err(Error::InvalidParameter("SMMALA needs eps2".into()))
            }
            (SamplerKind::Smmala, Some(e)) => check_positive("eps2", e)?,
            (_, Some(_)) => {
                return Err(Error::InvalidParameter(
                    "eps2 is only used by SMMALA".into(),
                ))
            }
            _ => {}
        }
        if let Some(r) = self.drift_clamp {
            check_positive("drift_clamp", r)?;
            if !matches!(self.kind, SamplerKind::Pula | SamplerKind::Pmala) {
                return Err(Error::InvalidParameter(
                    "drift clamp applies to the proximal samplers only".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub kernel: KernelSpec,
    pub delta: f64,
    /// Stored samples after thinning.
    pub n_samples: usize,
    pub burn_in: usize,
    pub thinning: usize,
    pub seed: u64,
    /// Independent RNG stream for this chain.
    pub stream: u64,
    /// Ignored by the unadjusted kernels.
    pub adaptation: Option<Adaptation>,
    /// Keep every post-burn-in MH decision for auditing.
    pub record_transitions: bool,
}

impl ChainConfig {
    pub fn new(kind: SamplerKind, delta: f64, n_samples: usize) -> Self {
        Self {
            kernel: KernelSpec::new(kind),
            delta,
            n_samples,
            burn_in: 0,
            thinning: 1,
            seed: 0,
            stream: 0,
            adaptation: None,
            record_transitions: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.kernel.validate()?;
        check_positive("delta", self.delta)?;
        if self.n_samples == 0 {
            return Err(Error::InvalidParameter("n_samples must be positive".into()));
        }
        if self.thinning == 0 {
            return Err(Error::InvalidParameter("thinning must be positive".into()));
        }
        if let Some(a) = &self.adaptation {
            a.validate()?;
        }
        Ok(())
    }

    /// Kernel invocations performed by [`run_chain`].
    pub fn total_steps(&self) -> usize {
        self.burn_in + self.n_samples * self.thinning
    }
}

/// Cached proposal moments `N(mean, δ · var_scale · I)` at a state.
#[derive(Clone, Debug, PartialEq)]
pub struct Proposal {
    pub mean: Vec<f64>,
    pub var_scale: f64,
    /// Inner prox solver state, reused to hot-start nearby evaluations.
    pub warm: Option<Vec<f64>>,
    pub prox_converged: bool,
}

/// Proposal moments of `kernel` at `x`.
pub fn proposal_moments<T: Target + ?Sized>(
    kernel: &KernelSpec,
    target: &T,
    x: &[f64],
    delta: f64,
    warm: Option<&[f64]>,
) -> Result<Proposal> {
    let half = 0.5 * delta;
    let plain = |mean: Vec<f64>| Proposal {
        mean,
        var_scale: 1.0,
        warm: None,
        prox_converged: true,
    };
    match kernel.kind {
        SamplerKind::Pula | SamplerKind::Pmala => {
            let out = target.prox(x, half, warm)?;
            let mut mean = out.point;
            if let Some(r) = kernel.drift_clamp {
                let shift = dist_sq(&mean, x).sqrt();
                if shift > r {
                    let s = r / shift;
                    for (m, &xi) in mean.iter_mut().zip(x) {
                        *m = xi + s * (*m - xi);
                    }
                }
            }
            Ok(Proposal {
                mean,
                var_scale: 1.0,
                warm: out.warm,
                prox_converged: out.converged,
            })
        }
        SamplerKind::Ula | SamplerKind::Mala => {
            let g = finite_gradient(target, x)?;
            Ok(plain(
                x.iter().zip(&g).map(|(xi, gi)| xi + half * gi).collect(),
            ))
        }
        SamplerKind::Malta => {
            let eps1 = kernel
                .malta_eps1
                .ok_or_else(|| Error::InvalidParameter("MALTA needs eps1".into()))?;
            let g = finite_gradient(target, x)?;
            let scale = eps1 / eps1.max(g.iter().map(|v| v * v).sum::<f64>().sqrt());
            Ok(plain(
                x.iter()
                    .zip(&g)
                    .map(|(xi, gi)| xi + half * scale * gi)
                    .collect(),
            ))
        }
        SamplerKind::Smmala => {
            let eps2 = kernel
                .smmala_eps2
                .ok_or_else(|| Error::InvalidParameter("SMMALA needs eps2".into()))?;
            if x.len() != 1 {
                return Err(Error::InvalidParameter(
                    "SMMALA is implemented for one-dimensional targets".into(),
                ));
            }
            let g = finite_gradient(target, x)?[0];
            let h = target
                .neg_hessian_1d(x[0])
                .ok_or(Error::CurvatureUnavailable)?
                + eps2;
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "regularised curvature {h} is not positive"
                )));
            }
            Ok(Proposal {
                mean: vec![x[0] + half * g / h],
                var_scale: 1.0 / h,
                warm: None,
                prox_converged: true,
            })
        }
        SamplerKind::Rwmh => Ok(plain(x.to_vec())),
    }
}

/// `log q(y | x)` for proposal moments computed at `x`, including the
/// variance normalisation but not the `2π` constant.
pub fn log_proposal_density(y: &[f64], proposal: &Proposal, delta: f64) -> f64 {
    let var = delta * proposal.var_scale;
    -dist_sq(y, &proposal.mean) / (2.0 * var) - 0.5 * y.len() as f64 * var.ln()
}

/// `log π(y) + log q(x|y) − log π(x) − log q(y|x)`.
pub fn mh_log_ratio(
    log_pi_x: f64,
    log_pi_y: f64,
    x: &[f64],
    y: &[f64],
    at_x: &Proposal,
    at_y: &Proposal,
    delta: f64,
) -> f64 {
    log_pi_y + log_proposal_density(x, at_y, delta)
        - log_pi_x
        - log_proposal_density(y, at_x, delta)
}

/// `min(1, exp(log r))`, zero for a non-finite or NaN ratio.
pub fn acceptance_probability(log_ratio: f64) -> f64 {
    if log_ratio.is_nan() {
        0.0
    } else {
        log_ratio.exp().min(1.0)
    }
}

/// Chain position together with its cached proposal moments.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainState {
    pub x: Vec<f64>,
    pub log_density: f64,
    pub proposal: Proposal,
}

impl ChainState {
    pub fn new<T: Target + ?Sized>(
        kernel: &KernelSpec,
        target: &T,
        x: Vec<f64>,
        delta: f64,
    ) -> Result<Self> {
        let proposal = proposal_moments(kernel, target, &x, delta, None)?;
        Ok(Self {
            log_density: target.log_density(&x),
            x,
            proposal,
        })
    }
}

/// One MH decision, replayable from its stored uniform draw.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionRecord {
    pub from: Vec<f64>,
    pub proposal: Vec<f64>,
    pub log_u: f64,
    pub log_ratio: f64,
    pub accepted: bool,
}

#[derive(Clone, Debug)]
pub struct Step {
    pub state: ChainState,
    pub accepted: bool,
    pub accept_prob: f64,
    pub record: TransitionRecord,
}

/// One kernel step from `state`. Unadjusted kernels always move.
pub fn kernel_step<T: Target + ?Sized, R: Rng + ?Sized>(
    kernel: &KernelSpec,
    target: &T,
    state: &ChainState,
    delta: f64,
    rng: &mut R,
) -> Result<Step> {
    let n = state.x.len();
    let mut z = vec![0.0; n];
    fill_standard_normal(rng, &mut z);
    let sd = (delta * state.proposal.var_scale).sqrt();
    let y: Vec<f64> = state
        .proposal
        .mean
        .iter()
        .zip(&z)
        .map(|(m, zi)| m + sd * zi)
        .collect();

    if !kernel.kind.is_adjusted() {
        let next = ChainState::new_warm(
            kernel,
            target,
            y.clone(),
            delta,
            state.proposal.warm.as_deref(),
        );
        let next = match next {
            Ok(s) => s,
            // A state that has left the domain of the drift is still a valid
            // position for an unadjusted chain; the driver flags it.
            Err(_) if y.iter().any(|v| !v.is_finite()) => ChainState {
                log_density: f64::NAN,
                proposal: Proposal {
                    mean: y.clone(),
                    var_scale: 1.0,
                    warm: None,
                    prox_converged: true,
                },
                x: y.clone(),
            },
            Err(e) => return Err(e),
        };
        let record = TransitionRecord {
            from: state.x.clone(),
            proposal: y,
            log_u: f64::NEG_INFINITY,
            log_ratio: 0.0,
            accepted: true,
        };
        return Ok(Step {
            state: next,
            accepted: true,
            accept_prob: 1.0,
            record,
        });
    }

    let log_u = open_unit(rng).ln();
    let log_pi_y = target.log_density(&y);
    let (log_ratio, candidate) = if log_pi_y == f64::NEG_INFINITY || !log_pi_y.is_finite() {
        (f64::NEG_INFINITY, None)
    } else {
        let at_y = proposal_moments(kernel, target, &y, delta, state.proposal.warm.as_deref())?;
        let r = mh_log_ratio(
            state.log_density,
            log_pi_y,
            &state.x,
            &y,
            &state.proposal,
            &at_y,
            delta,
        );
        (r, Some(at_y))
    };
    let accepted = log_u < log_ratio;
    let record = TransitionRecord {
        from: state.x.clone(),
        proposal: y.clone(),
        log_u,
        log_ratio,
        accepted,
    };
    let next = match (accepted, candidate) {
        (true, Some(proposal)) => ChainState {
            x: y,
            log_density: log_pi_y,
            proposal,
        },
        _ => state.clone(),
    };
    Ok(Step {
        state: next,
        accepted,
        accept_prob: acceptance_probability(log_ratio),
        record,
    })
}

impl ChainState {
    fn new_warm<T: Target + ?Sized>(
        kernel: &KernelSpec,
        target: &T,
        x: Vec<f64>,
        delta: f64,
        warm: Option<&[f64]>,
    ) -> Result<Self> {
        let proposal = proposal_moments(kernel, target, &x, delta, warm)?;
        Ok(Self {
            log_density: target.log_density(&x),
            x,
            proposal,
        })
    }
}

/// P-ULA update `prox^{δ/2}_g(x) + √δ z` for a given noise vector.
pub fn pula_step<T: Target + ?Sized>(
    target: &T,
    x: &[f64],
    delta: f64,
    noise: &[f64],
) -> Result<Vec<f64>> {
    check_positive("delta", delta)?;
    let p = target.prox(x, 0.5 * delta, None)?.point;
    let sd = delta.sqrt();
    Ok(p.iter().zip(noise).map(|(pi, zi)| pi + sd * zi).collect())
}

/// ULA update `x + (δ/2)∇g(x) + √δ z` for a given noise vector.
pub fn ula_step<T: Target + ?Sized>(
    target: &T,
    x: &[f64],
    delta: f64,
    noise: &[f64],
) -> Result<Vec<f64>> {
    check_positive("delta", delta)?;
    let g = finite_gradient(target, x)?;
    let sd = delta.sqrt();
    Ok(x.iter()
        .zip(&g)
        .zip(noise)
        .map(|((xi, gi), zi)| xi + 0.5 * delta * gi + sd * zi)
        .collect())
}

fn adjusted_step<T: Target + ?Sized, R: Rng + ?Sized>(
    kernel: KernelSpec,
    target: &T,
    state: &ChainState,
    delta: f64,
    rng: &mut R,
) -> Result<Step> {
    check_positive("delta", delta)?;
    kernel.validate()?;
    kernel_step(&kernel, target, state, delta, rng)
}

/// P-MALA step. `state` must carry proposal moments computed with the same
/// `δ`; the returned state carries the proposal's prox when accepted.
pub fn pmala_step<T: Target + ?Sized, R: Rng + ?Sized>(
    target: &T,
    state: &ChainState,
    delta: f64,
    rng: &mut R,
) -> Result<Step> {
    adjusted_step(
        KernelSpec::new(SamplerKind::Pmala),
        target,
        state,
        delta,
        rng,
    )
}

pub fn mala_step<T: Target + ?Sized, R: Rng + ?Sized>(
    target: &T,
    state: &ChainState,
    delta: f64,
    rng: &mut R,
) -> Result<Step> {
    adjusted_step(
        KernelSpec::new(SamplerKind::Mala),
        target,
        state,
        delta,
        rng,
    )
}

pub fn malta_step<T: Target + ?Sized, R: Rng + ?Sized>(
    target: &T,
    state: &ChainState,
    delta: f64,
    eps1: f64,
    rng: &mut R,
) -> Result<Step> {
    let kernel = KernelSpec {
        malta_eps1: Some(eps1),
        ..KernelSpec::new(SamplerKind::Malta)
    };
    adjusted_step(kernel, target, state, delta, rng)
}

pub fn smmala1d_step<T: Target + ?Sized, R: Rng + ?Sized>(
    target: &T,
    state: &ChainState,
    delta: f64,
    eps2: f64,
    rng: &mut R,
) -> Result<Step> {
    let kernel = KernelSpec {
        smmala_eps2: Some(eps2),
        ..KernelSpec::new(SamplerKind::Smmala)
    };
    adjusted_step(kernel, target, state, delta, rng)
}

pub fn rwmh_step<T: Target + ?Sized, R: Rng + ?Sized>(
    target: &T,
    state: &ChainState,
    delta: f64,
    rng: &mut R,
) -> Result<Step> {
    adjusted_step(
        KernelSpec::new(SamplerKind::Rwmh),
        target,
        state,
        delta,
        rng,
    )
}

/// Stateful chain: kernel, current state, step size and RNG stream.
pub struct Sampler<'a, T: Target + ?Sized> {
    target: &'a T,
    config: ChainConfig,
    delta: f64,
    state: ChainState,
    rng: ChainRng,
    steps: usize,
    accepted: usize,
    prox_nonconverged: usize,
}

impl<'a, T: Target + ?Sized> Sampler<'a, T> {
    pub fn new(target: &'a T, config: ChainConfig, initial: &[f64]) -> Result<Self> {
        config.validate()?;
        if initial.len() != target.dim() {
            return Err(Error::DimensionMismatch {
                expected: target.dim(),
                found: initial.len(),
            });
        }
        let state = ChainState::new(&config.kernel, target, initial.to_vec(), config.delta)?;
        if config.kernel.kind.is_adjusted() && !state.log_density.is_finite() {
            return Err(Error::InvalidInitialState(state.log_density));
        }
        let prox_nonconverged = usize::from(!state.proposal.prox_converged);
        Ok(Self {
            target,
            delta: config.delta,
            rng: chain_rng(config.seed, config.stream),
            config,
            state,
            steps: 0,
            accepted: 0,
            prox_nonconverged,
        })
    }

    pub fn state(&self) -> &ChainState {
        &self.state
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn config(&self) -> &ChainConfig {
        &self.config
    }

    /// Changes `δ` and recomputes the cached proposal moments.
    pub fn set_delta(&mut self, delta: f64) -> Result<()> {
        check_positive("delta", delta)?;
        self.delta = delta;
        self.state.proposal = proposal_moments(
            &self.config.kernel,
            self.target,
            &self.state.x,
            delta,
            self.state.proposal.warm.as_deref(),
        )?;
        Ok(())
    }

    /// Steps and acceptances since the last [`Sampler::reset_counters`].
    pub fn counters(&self) -> (usize, usize) {
        (self.steps, self.accepted)
    }

    pub fn reset_counters(&mut self) {
        self.steps = 0;
        self.accepted = 0;
    }

    pub fn prox_nonconverged(&self) -> usize {
        self.prox_nonconverged
    }

    /// Advances one kernel step. Non-finite positions are an error.
    pub fn step(&mut self) -> Result<Step> {
        let step = kernel_step(
            &self.config.kernel,
            self.target,
            &self.state,
            self.delta,
            &mut self.rng,
        )?;
        self.steps += 1;
        if step.accepted {
            self.accepted += 1;
            if !step.state.proposal.prox_converged {
                self.prox_nonconverged += 1;
            }
        }
        self.state = step.state.clone();
        if self.state.x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteState {
                iteration: self.steps,
            });
        }
        Ok(step)
    }

    /// Burn-in step with Robbins–Monro tuning of `δ` (iteration `m ≥ 1`).
    pub fn adapt_step(&mut self, m: usize, adaptation: &Adaptation) -> Result<Step> {
        let step = self.step()?;
        if self.config.kernel.kind.is_adjusted() {
            let gain = (m.max(1) as f64).powf(-adaptation.decay);
            let next = (self.delta.ln() + gain * (step.accept_prob - adaptation.target())).exp();
            if next.is_finite() && next > 0.0 {
                self.set_delta(next)?;
            }
        }
        Ok(step)
    }
}

#[derive(Clone, Debug)]
pub struct ChainRun {
    pub samples: Vec<Vec<f64>>,
    /// Post-burn-in acceptance rate (1 for unadjusted kernels).
    pub acceptance_rate: f64,
    pub burn_in_acceptance_rate: f64,
    pub delta_final: f64,
    pub log_density_trace: Vec<f64>,
    /// Accepted states whose inner prox stopped before its tolerance.
    pub prox_nonconverged: usize,
    pub kernel_steps: usize,
    pub transitions: Vec<TransitionRecord>,
}

/// Runs burn-in (with optional adaptation) then `n_samples × thinning`
/// steps, storing every `thinning`-th state.
pub fn run_chain<T: Target + ?Sized>(
    target: &T,
    config: &ChainConfig,
    initial: &[f64],
) -> Result<ChainRun> {
    let mut sampler = Sampler::new(target, config.clone(), initial)?;
    for m in 1..=config.burn_in {
        match &config.adaptation {
            Some(a) => sampler.adapt_step(m, a)?,
            None => sampler.step()?,
        };
    }
    let (b_steps, b_acc) = sampler.counters();
    let burn_in_acceptance_rate = if b_steps == 0 {
        f64::NAN
    } else {
        b_acc as f64 / b_steps as f64
    };
    sampler.reset_counters();

    let mut samples = Vec::with_capacity(config.n_samples);
    let mut trace = Vec::with_capacity(config.n_samples);
    let mut transitions = Vec::new();
    for _ in 0..config.n_samples {
        for _ in 0..config.thinning {
            let step = sampler.step()?;
            if config.record_transitions && config.kernel.kind.is_adjusted() {
                transitions.push(step.record);
            }
        }
        samples.push(sampler.state.x.clone());
        trace.push(sampler.state.log_density);
    }
    let (steps, acc) = sampler.counters();
    let acceptance_rate = if config.kernel.kind.is_adjusted() {
        acc as f64 / steps as f64
    } else {
        1.0
    };
    Ok(ChainRun {
        samples,
        acceptance_rate,
        burn_in_acceptance_rate,
        delta_final: sampler.delta,
        log_density_trace: trace,
        prox_nonconverged: sampler.prox_nonconverged,
        kernel_steps: config.total_steps(),
        transitions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::benchmark::{benchmark_target, Benchmark1D};
    use crate::rng::chain_rng;

    fn state<T: Target>(kind: SamplerKind, t: &T, x: f64, delta: f64) -> ChainState {
        ChainState::new(&KernelSpec::new(kind), t, vec![x], delta).unwrap()
    }

    #[test]
    fn pula_examples() {
        let gauss = benchmark_target(Benchmark1D::GAUSSIAN, 1).unwrap();
        assert_eq!(pula_step(&gauss, &[1.0], 1.0, &[0.0]).unwrap(), vec![0.5]);
        assert_eq!(pula_step(&gauss, &[0.0], 0.7, &[0.0]).unwrap(), vec![0.0]);
        let laplace = benchmark_target(Benchmark1D::LAPLACE, 1).unwrap();
        assert_eq!(pula_step(&laplace, &[3.0], 2.0, &[0.0]).unwrap(), vec![2.0]);
    }

    #[test]
    fn ula_and_mala_means() {
        let normal = benchmark_target(Benchmark1D::STANDARD_NORMAL, 1).unwrap();
        assert_eq!(ula_step(&normal, &[0.0], 1.0, &[0.0]).unwrap(), vec![0.0]);
        let quartic = benchmark_target(Benchmark1D::QUARTIC, 1).unwrap();
        assert_eq!(
            state(SamplerKind::Mala, &quartic, 10.0, 1.0).proposal.mean,
            vec![-1990.0]
        );
        let laplace = benchmark_target(Benchmark1D::LAPLACE, 1).unwrap();
        assert!(matches!(
            ula_step(&laplace, &[0.0], 1.0, &[0.0]),
            Err(Error::NonFiniteGradient { index: 0 })
        ));
    }

    #[test]
    fn identical_proposal_has_unit_ratio() {
        let normal = benchmark_target(Benchmark1D::STANDARD_NORMAL, 1).unwrap();
        for kind in [SamplerKind::Pmala, SamplerKind::Mala, SamplerKind::Rwmh] {
            let s = state(kind, &normal, 0.4, 0.8);
            let r = mh_log_ratio(
                s.log_density,
                s.log_density,
                &s.x,
                &s.x,
                &s.proposal,
                &s.proposal,
                0.8,
            );
            assert_eq!(r, 0.0);
            assert_eq!(acceptance_probability(r), 1.0);
        }
    }

    #[test]
    fn pmala_ratio_on_the_uniform_interior() {
        let t = benchmark_target(Benchmark1D::UNIFORM, 1).unwrap();
        let delta = 0.3;
        let a = state(SamplerKind::Pmala, &t, 0.5, delta);
        let b = state(SamplerKind::Pmala, &t, 0.3, delta);
        let r = mh_log_ratio(
            a.log_density,
            b.log_density,
            &a.x,
            &b.x,
            &a.proposal,
            &b.proposal,
            delta,
        );
        let want = ((0.3f64 - 0.5).powi(2) - (0.5f64 - 0.3).powi(2)) / (2.0 * delta);
        assert!((r - want).abs() < 1e-15);
    }

    #[test]
    fn malta_truncates_large_drifts_only() {
        // g = −x², so ‖∇g(20)‖ = 40 and ‖∇g(2.5)‖ = 5
        let gauss = benchmark_target(Benchmark1D::GAUSSIAN, 1).unwrap();
        let k = KernelSpec {
            malta_eps1: Some(20.0),
            ..KernelSpec::new(SamplerKind::Malta)
        };
        let p = proposal_moments(&k, &gauss, &[20.0], 1.0, None).unwrap();
        assert!((p.mean[0] - (20.0 - 0.5 * 0.5 * 40.0)).abs() < 1e-12);
        let p = proposal_moments(&k, &gauss, &[2.5], 1.0, None).unwrap();
        assert!((p.mean[0] - (2.5 - 0.5 * 5.0)).abs() < 1e-12);
    }

    #[test]
    fn smmala_variance() {
        let t = benchmark_target(Benchmark1D::QUARTIC, 1).unwrap();
        let k = KernelSpec {
            smmala_eps2: Some(0.1),
            ..KernelSpec::new(SamplerKind::Smmala)
        };
        let p0 = proposal_moments(&k, &t, &[0.0], 1.0, None).unwrap();
        assert!((p0.var_scale - 10.0).abs() < 1e-12);
        let p10 = proposal_moments(&k, &t, &[10.0], 1.0, None).unwrap();
        assert!((p10.var_scale - 1.0 / 1200.1).abs() < 1e-15);
    }

    #[test]
    fn rwmh_ratios() {
        let normal = benchmark_target(Benchmark1D::STANDARD_NORMAL, 1).unwrap();
        let a = state(SamplerKind::Rwmh, &normal, 0.0, 1.0);
        let b = state(SamplerKind::Rwmh, &normal, 1.0, 1.0);
        let r = mh_log_ratio(
            a.log_density,
            b.log_density,
            &a.x,
            &b.x,
            &a.proposal,
            &b.proposal,
            1.0,
        );
        assert!((acceptance_probability(r) - (-0.5f64).exp()).abs() < 1e-15);

        let uniform = benchmark_target(Benchmark1D::UNIFORM, 1).unwrap();
        assert_eq!(uniform.log_density(&[2.0]), f64::NEG_INFINITY);
        let mut rng = chain_rng(0, 0);
        let s = state(SamplerKind::Rwmh, &uniform, 0.0, 25.0);
        for _ in 0..200 {
            let step = rwmh_step(&uniform, &s, 25.0, &mut rng).unwrap();
            if step.record.proposal[0].abs() > 1.0 {
                assert!(!step.accepted);
            }
        }
    }

    #[test]
    fn step_count_contract() {
        let normal = benchmark_target(Benchmark1D::STANDARD_NORMAL, 1).unwrap();
        let mut cfg = ChainConfig::new(SamplerKind::Pmala, 1.0, 100);
        cfg.thinning = 10;
        cfg.burn_in = 50;
        cfg.record_transitions = true;
        let run = run_chain(&normal, &cfg, &[0.0]).unwrap();
        assert_eq!(run.kernel_steps, 1050);
        assert_eq!(run.samples.len(), 100);
        assert_eq!(run.transitions.len(), 1000);
    }

    #[test]
    fn adaptation_reaches_the_band() {
        let normal = benchmark_target(Benchmark1D::STANDARD_NORMAL, 1).unwrap();
        let mut cfg = ChainConfig::new(SamplerKind::Pmala, 5.0, 5000);
        cfg.burn_in = 3000;
        cfg.seed = 11;
        cfg.adaptation = Some(Adaptation::default());
        let run = run_chain(&normal, &cfg, &[0.0]).unwrap();
        assert!(
            (0.35..=0.65).contains(&run.acceptance_rate),
            "{}",
            run.acceptance_rate
        );
        let again = run_chain(&normal, &cfg, &[0.0]).unwrap();
        assert_eq!(run.samples, again.samples);
    }

    #[test]
    fn config_validation() {
        let mut cfg = ChainConfig::new(SamplerKind::Malta, 1.0, 10);
        assert!(cfg.validate().is_err());
        cfg.kernel.malta_eps1 = Some(20.0);
        assert!(cfg.validate().is_ok());
        cfg.kernel.smmala_eps2 = Some(0.1);
        assert!(cfg.validate().is_err());
        let mut cfg = ChainConfig::new(SamplerKind::Smmala, 1.0, 10);
        assert!(cfg.validate().is_err());
        cfg.kernel.smmala_eps2 = Some(0.1);
        assert!(cfg.validate().is_ok());
        assert!(ChainConfig::new(SamplerKind::Rwmh, 0.0, 10)
            .validate()
            .is_err());
        assert!(ChainConfig::new(SamplerKind::Rwmh, 1.0, 0)
            .validate()
            .is_err());
    }

    #[test]
    fn sampler_names_round_trip() {
        for k in SamplerKind::ALL {
            assert_eq!(k.to_string().parse::<SamplerKind>().unwrap(), k);
        }
        assert_eq!("P-MALA".parse::<SamplerKind>().unwrap(), SamplerKind::Pmala);
        assert!("hmc".parse::<SamplerKind>().is_err());
    }
}
