//! Proximity mappings `prox^λ_g(x) = argmax_u g(u) − ‖u − x‖² / 2λ` for the
//! concave log-densities used across the crate.
//!
//! Closed forms cover the ℓ1 (soft threshold), squared ℓ2, quartic and
//! general power-law penalties, box indicators and the nuclear norm (singular
//! value thresholding). Anisotropic total variation is handled iteratively by
//! projected gradient on the dual.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, check_nonnegative, check_positive, Error, Result};
use crate::linalg::{svd, DiscreteGradient, Grid};

/// Names of the closed-form operators, reported through [`ProxStrategy`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClosedFormProx {
    SoftThreshold,
    Quadratic,
    QuarticCubicRoot,
    PowerLaw,
    BoxProjection,
    SingularValueThreshold,
    Identity,
}

/// How a target computes its proximity mapping.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ProxStrategy {
    ClosedForm(ClosedFormProx),
    Iterative {
        solver: String,
        max_iters: usize,
        tolerance: f64,
        hot_start: bool,
    },
    /// `g = g1 + g2` with `g1` differentiable; the prox is approximated by one
    /// forward (gradient) step on `g1` followed by the exact or iterative prox
    /// of `g2`.
    ForwardBackwardSplit {
        nonsmooth: Box<ProxStrategy>,
    },
}

/// Result of a proximity-mapping evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct ProxOutput {
    pub point: Vec<f64>,
    /// Achieved residual of the inner solver; zero for closed forms.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Solver state usable to hot-start the next evaluation.
    pub warm: Option<Vec<f64>>,
}

impl ProxOutput {
    pub fn exact(point: Vec<f64>) -> Self {
        Self {
            point,
            residual: 0.0,
            iterations: 0,
            converged: true,
            warm: None,
        }
    }
}

/// Soft threshold at `αλ`, the prox of `−α|u|`. Ties `|x| = αλ` map to zero.
#[inline]
pub fn soft_threshold_scalar(x: f64, threshold: f64) -> f64 {
    if x > threshold {
        x - threshold
    } else if x < -threshold {
        x + threshold
    } else {
        0.0
    }
}

/// Prox of `g(u) = −α‖u‖₁`.
pub fn prox_soft_threshold(x: &[f64], lambda: f64, alpha: f64) -> Result<Vec<f64>> {
    check_positive("lambda", lambda)?;
    check_nonnegative("alpha", alpha)?;
    let t = alpha * lambda;
    Ok(x.iter().map(|&v| soft_threshold_scalar(v, t)).collect())
}

/// Prox of `g(u) = −γ‖u‖²`, i.e. `x / (1 + 2γλ)`.
pub fn prox_quadratic(x: &[f64], lambda: f64, gamma: f64) -> Result<Vec<f64>> {
    check_positive("lambda", lambda)?;
    check_nonnegative("gamma", gamma)?;
    let s = 1.0 / (1.0 + 2.0 * gamma * lambda);
    Ok(x.iter().map(|&v| v * s).collect())
}

const ROOT_MAX_ITERS: usize = 100;

/// Safeguarded Newton for an increasing `f` with a root in `[lo, hi]`.
fn newton_bisect(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    start: f64,
    tol: f64,
) -> Result<f64> {
    let mut u = start.clamp(lo, hi);
    for _ in 0..ROOT_MAX_ITERS {
        let fu = f(u);
        if fu.abs() < tol {
            return Ok(u);
        }
        if fu > 0.0 {
            hi = u;
        } else {
            lo = u;
        }
        let d = df(u);
        let newton = u - fu / d;
        u = if d.is_finite() && d > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * hi.abs().max(lo.abs()).max(1.0) {
            return Ok(u);
        }
    }
    let fu = f(u);
    if fu.abs() < tol {
        Ok(u)
    } else {
        Err(Error::Numerical(format!(
            "root solver stalled with residual {fu:e}"
        )))
    }
}

/// Prox of `g(u) = −u⁴`: the real root of `4λu³ + u − x = 0`.
pub fn prox_quartic_1d(x: f64, lambda: f64) -> Result<f64> {
    check_positive("lambda", lambda)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    let a = x.abs();
    let c = 4.0 * lambda;
    let start = a.min((a / c).cbrt());
    let root = newton_bisect(
        |u| c * u * u * u + u - a,
        |u| 3.0 * c * u * u + 1.0,
        0.0,
        a,
        start,
        1e-12 * a.max(1.0),
    )?;
    Ok(root.copysign(x))
}

/// Prox of `g(u) = −γ|u|^β` for `β ≥ 1`, componentwise.
pub fn prox_power_1d(x: f64, lambda: f64, beta: f64, gamma: f64) -> Result<f64> {
    check_positive("lambda", lambda)?;
    check_positive("gamma", gamma)?;
    if !(beta >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "power-law exponent must be >= 1, got {beta}"
        )));
    }
    if beta == 1.0 {
        return Ok(soft_threshold_scalar(x, gamma * lambda));
    }
    if beta == 2.0 {
        return Ok(x / (1.0 + 2.0 * gamma * lambda));
    }
    if beta == 4.0 {
        return prox_quartic_1d(x, gamma * lambda);
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let a = x.abs();
    let c = lambda * gamma * beta;
    let root = newton_bisect(
        |u| u + c * u.powf(beta - 1.0) - a,
        |u| 1.0 + c * (beta - 1.0) * u.powf(beta - 2.0),
        0.0,
        a,
        a.min((a / c).powf(1.0 / (beta - 1.0))),
        1e-12 * a.max(1.0),
    )?;
    Ok(root.copysign(x))
}

/// Euclidean projection onto the box `[lo, hi]`, the prox of its indicator for
/// every `λ`.
pub fn prox_box_projection(x: &[f64], lo: &[f64], hi: &[f64]) -> Result<Vec<f64>> {
    check_len(x.len(), lo.len())?;
    check_len(x.len(), hi.len())?;
    if let Some(i) = (0..x.len()).find(|&i| !(lo[i] <= hi[i])) {
        return Err(Error::InvalidParameter(format!(
            "box bound {i}: lo {} > hi {}",
            lo[i], hi[i]
        )));
    }
    Ok(x.iter()
        .zip(lo.iter().zip(hi))
        .map(|(&v, (&l, &h))| v.clamp(l, h))
        .collect())
}

/// Singular value soft-thresholding: `U diag(max(s − τ, 0)) Vᵀ`, the prox of
/// `−‖·‖_*` with `λ = τ`.
pub fn prox_nuclear_svt(x: &Grid, tau: f64) -> Result<Grid> {
    check_nonnegative("tau", tau)?;
    let dec = svd(x)?;
    let shrunk: Vec<f64> = dec
        .singular_values
        .iter()
        .map(|s| (s - tau).max(0.0))
        .collect();
    Ok(dec.recompose(&shrunk))
}

/// Dual projection iteration settings for the total-variation prox.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TvSolver {
    /// Dual gradient step; convergence needs `step < 1/4`.
    pub step: f64,
    pub max_iters: usize,
    /// Stop once `‖p_{k+1} − p_k‖ / ‖p_{k+1}‖` falls below this.
    pub tolerance: f64,
    pub hot_start: bool,
}

impl Default for TvSolver {
    fn default() -> Self {
        Self {
            step: 0.248,
            max_iters: 50,
            tolerance: 1e-5,
            hot_start: true,
        }
    }
}

impl TvSolver {
    pub fn strategy(&self) -> ProxStrategy {
        ProxStrategy::Iterative {
            solver: "tv-dual-projection".into(),
            max_iters: self.max_iters,
            tolerance: self.tolerance,
            hot_start: self.hot_start,
        }
    }
}

/// Approximate prox of `g(u) = −α‖∇u‖₁` (anisotropic TV) on an image of the
/// given shape.
///
/// Minimises `½‖u − x‖² + αλ‖∇u‖₁` through its dual: `u = x + αλ div p` with
/// `p` iterated as `p ← clip(p + step · ∇(div p + x / αλ), −1, 1)`. On
/// iteration exhaustion the last iterate is returned with `converged = false`.
pub fn prox_tv(
    x: &[f64],
    op: &DiscreteGradient,
    lambda: f64,
    alpha: f64,
    solver: &TvSolver,
    warm: Option<&[f64]>,
) -> Result<ProxOutput> {
    check_positive("lambda", lambda)?;
    check_nonnegative("alpha", alpha)?;
    let (rows, cols) = op.shape();
    let n = rows * cols;
    check_len(n, x.len())?;
    if !(solver.step > 0.0 && solver.step < 0.25) {
        return Err(Error::InvalidParameter(format!(
            "TV dual step must lie in (0, 0.25), got {}",
            solver.step
        )));
    }
    let theta = alpha * lambda;
    if theta == 0.0 {
        return Ok(ProxOutput::exact(x.to_vec()));
    }

    let mut p = match warm {
        Some(w) if solver.hot_start && w.len() == 2 * n => w.to_vec(),
        _ => vec![0.0; 2 * n],
    };
    let inv_theta = 1.0 / theta;
    let mut div = vec![0.0; n];
    let mut grad = vec![0.0; 2 * n];
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < solver.max_iters {
        iterations += 1;
        op.divergence_into(&p, &mut div);
        for (d, &xi) in div.iter_mut().zip(x) {
            *d += xi * inv_theta;
        }
        op.gradient_into(&div, &mut grad);
        let mut change = 0.0;
        let mut size = 0.0;
        for (pi, &gi) in p.iter_mut().zip(&grad) {
            let next = (*pi + solver.step * gi).clamp(-1.0, 1.0);
            change += (next - *pi) * (next - *pi);
            size += next * next;
            *pi = next;
        }
        residual = if change == 0.0 {
            0.0
        } else {
            (change / size).sqrt()
        };
        if residual < solver.tolerance {
            break;
        }
    }
    op.divergence_into(&p, &mut div);
    let point: Vec<f64> = x.iter().zip(&div).map(|(&xi, &d)| xi + theta * d).collect();
    Ok(ProxOutput {
        point,
        residual,
        iterations,
        converged: residual < solver.tolerance,
        warm: Some(p),
    })
}
