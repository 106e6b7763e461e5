use std::time::{Duration, Instant};

use proxmcmc::diagnostics::{autocorrelation, effective_sample_size, ScalarSummaryTrace};
use proxmcmc::{ChainConfig, Sampler, Target};

/// How long the post-burn-in phase runs.
#[derive(Clone, Copy, Debug)]
pub enum Budget {
    /// `n_samples × thinning` kernel steps.
    Steps,
    /// Keep sampling until the total elapsed time (burn-in included) reaches
    /// the given duration. Output length is timing-dependent.
    WallClock(Duration),
}

/// Stored chain output with per-sample bookkeeping.
#[derive(Clone, Debug, Default)]
pub struct Recorded {
    /// Kernel step index (counted after burn-in) of each stored sample.
    pub iterations: Vec<usize>,
    pub samples: Vec<Vec<f64>>,
    pub log_density: Vec<f64>,
    /// Whether the step that produced each stored sample was accepted.
    pub accepted: Vec<bool>,
    pub acceptance_rate: Option<f64>,
    pub burn_in_acceptance_rate: Option<f64>,
    pub delta_final: f64,
    pub diverged_at: Option<usize>,
    pub failure: Option<String>,
    pub prox_nonconverged: usize,
    pub kernel_steps: usize,
    pub wall_time: f64,
}

pub struct DriveOptions {
    pub budget: Budget,
    /// Stop once any coordinate exceeds this magnitude.
    pub divergence: Option<f64>,
    /// Keep full states; otherwise only the scalar traces are stored.
    pub keep_samples: bool,
}

/// Runs a chain, recording failures and divergence instead of aborting.
/// Construction errors (invalid configuration or start) are returned.
pub fn drive<T: Target + ?Sized>(
    target: &T,
    config: &ChainConfig,
    initial: &[f64],
    opts: &DriveOptions,
) -> proxmcmc::Result<Recorded> {
    let start = Instant::now();
    let mut sampler = Sampler::new(target, config.clone(), initial)?;
    let adjusted = config.kernel.kind.is_adjusted();
    let mut rec = Recorded::default();
    let diverged = |x: &[f64]| {
        opts.divergence
            .is_some_and(|thr| x.iter().any(|v| v.abs() > thr))
    };

    let mut burn_ok = true;
    for m in 1..=config.burn_in {
        let res = match &config.adaptation {
            Some(a) => sampler.adapt_step(m, a),
            None => sampler.step(),
        };
        if let Err(e) = res {
            rec.failure = Some(format!("burn-in step {m}: {e}"));
            burn_ok = false;
            break;
        }
        if diverged(&sampler.state().x) {
            rec.diverged_at = Some(0);
            burn_ok = false;
            break;
        }
    }
    let (b_steps, b_acc) = sampler.counters();
    if adjusted && b_steps > 0 {
        rec.burn_in_acceptance_rate = Some(b_acc as f64 / b_steps as f64);
    }
    sampler.reset_counters();

    let mut t = 0usize;
    if burn_ok {
        'outer: loop {
            match opts.budget {
                Budget::Steps if rec.log_density.len() >= config.n_samples => break,
                Budget::WallClock(limit) if start.elapsed() >= limit => break,
                _ => {}
            }
            let mut last_accepted = false;
            for _ in 0..config.thinning {
                t += 1;
                match sampler.step() {
                    Ok(step) => last_accepted = step.accepted,
                    Err(e) => {
                        rec.failure = Some(format!("step {t}: {e}"));
                        break 'outer;
                    }
                }
                if diverged(&sampler.state().x) {
                    rec.diverged_at = Some(t);
                    break;
                }
            }
            let state = sampler.state();
            rec.iterations.push(t);
            rec.log_density.push(state.log_density);
            rec.accepted.push(last_accepted);
            if opts.keep_samples {
                rec.samples.push(state.x.clone());
            } else if state.x.len() == 1 {
                rec.samples.push(vec![state.x[0]]);
            }
            if rec.diverged_at.is_some() {
                break;
            }
        }
    }
    let (steps, acc) = sampler.counters();
    if adjusted && steps > 0 {
        rec.acceptance_rate = Some(acc as f64 / steps as f64);
    }
    rec.delta_final = sampler.delta();
    rec.prox_nonconverged = sampler.prox_nonconverged();
    rec.kernel_steps = b_steps + steps;
    rec.wall_time = start.elapsed().as_secs_f64();
    Ok(rec)
}

/// ESS of a scalar trace, or `None` when it is undefined (too short,
/// constant or non-finite).
pub fn ess_of(label: &str, values: &[f64]) -> Option<f64> {
    let trace = ScalarSummaryTrace::new(label, values.to_vec()).ok()?;
    effective_sample_size(&trace).ok()
}

pub fn acf_of(label: &str, values: &[f64], max_lag: usize) -> Option<Vec<f64>> {
    let trace = ScalarSummaryTrace::new(label, values.to_vec()).ok()?;
    autocorrelation(&trace, max_lag).ok()
}
