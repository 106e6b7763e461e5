//! Log-concave targets `π(x) ∝ exp g(x)` and their Moreau approximations.
//!
//! Normalising constants never appear: every consumer works with `g` and
//! `prox^λ_g` only.

use crate::error::{check_len, check_positive, Error, Result};
use crate::linalg::dist_sq;
use crate::prox::{ProxOutput, ProxStrategy};

/// A log-concave density known through its unnormalised log-density `g`.
pub trait Target: Send + Sync {
    fn dim(&self) -> usize;

    /// `g(x)`, which may be `−∞` outside the support.
    fn log_density(&self, x: &[f64]) -> f64;

    /// `∇g(x)` where the target provides one. Entries may be non-finite at
    /// points of non-differentiability; samplers check them.
    fn gradient(&self, _x: &[f64]) -> Result<Vec<f64>> {
        Err(Error::GradientUnavailable)
    }

    /// `prox^λ_g(x)`, optionally hot-started from a previous solver state.
    fn prox(&self, x: &[f64], lambda: f64, warm: Option<&[f64]>) -> Result<ProxOutput>;

    fn prox_strategy(&self) -> ProxStrategy;

    /// `−g''(x)` for one-dimensional targets, used by the position-dependent
    /// sampler.
    fn neg_hessian_1d(&self, _x: f64) -> Option<f64> {
        None
    }
}

impl<T: Target + ?Sized> Target for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn log_density(&self, x: &[f64]) -> f64 {
        (**self).log_density(x)
    }
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        (**self).gradient(x)
    }
    fn prox(&self, x: &[f64], lambda: f64, warm: Option<&[f64]>) -> Result<ProxOutput> {
        (**self).prox(x, lambda, warm)
    }
    fn prox_strategy(&self) -> ProxStrategy {
        (**self).prox_strategy()
    }
    fn neg_hessian_1d(&self, x: f64) -> Option<f64> {
        (**self).neg_hessian_1d(x)
    }
}

/// Gradient with every entry checked for finiteness.
pub fn finite_gradient<T: Target + ?Sized>(target: &T, x: &[f64]) -> Result<Vec<f64>> {
    let g = target.gradient(x)?;
    match g.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFiniteGradient { index }),
        None => Ok(g),
    }
}

/// The λ-Moreau approximation of a target evaluated at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct MoreauEval {
    pub prox_point: Vec<f64>,
    /// `log π_λ(x)` up to the additive constant `log κ'`:
    /// `g(p) − ‖p − x‖² / 2λ` with `p = prox^λ_g(x)`.
    pub log_density_unnorm: f64,
    /// `∇ log π_λ(x) = (p − x) / λ`.
    pub log_gradient: Vec<f64>,
}

pub fn moreau_eval<T: Target + ?Sized>(target: &T, x: &[f64], lambda: f64) -> Result<MoreauEval> {
    check_positive("lambda", lambda)?;
    check_len(target.dim(), x.len())?;
    let p = target.prox(x, lambda, None)?.point;
    let log_density_unnorm = target.log_density(&p) - dist_sq(&p, x) / (2.0 * lambda);
    let log_gradient = p.iter().zip(x).map(|(pi, xi)| (pi - xi) / lambda).collect();
    Ok(MoreauEval {
        prox_point: p,
        log_density_unnorm,
        log_gradient,
    })
}

/// Midpoint concavity spot check `g((a+b)/2) ≥ (g(a)+g(b))/2 − tol` over the
/// given pairs. Returns the index of the first violating pair.
pub fn check_midpoint_concavity<T: Target + ?Sized>(
    target: &T,
    pairs: &[(Vec<f64>, Vec<f64>)],
    tol: f64,
) -> std::result::Result<(), usize> {
    for (k, (a, b)) in pairs.iter().enumerate() {
        let mid: Vec<f64> = a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect();
        let chord = 0.5 * (target.log_density(a) + target.log_density(b));
        if chord == f64::NEG_INFINITY {
            continue;
        }
        if target.log_density(&mid) < chord - tol {
            return Err(k);
        }
    }
    Ok(())
}
