//! Composite targets `g = g1 + g2` with `g1` smooth and `g2` prox-friendly,
//! and the forward-backward approximation of their proximity mapping:
//!
//! `prox^λ_g(x) ≈ prox^λ_{g2}(x + λ ∇g1(x))`.
//!
//! The gradient step uses `2λ · c` with `c = 1/2`, which is what completing
//! the square in the linearised objective gives. The approximation is exact
//! whenever `g1` is affine.

use crate::error::{check_len, check_nonnegative, check_positive, Result};
use crate::linalg::{dot, norm_sq, DiscreteGradient};
use crate::prox::{
    prox_soft_threshold, prox_tv, ClosedFormProx, ProxOutput, ProxStrategy, TvSolver,
};
use crate::target::Target;

/// Factor `c` in the gradient step `x + 2λc ∇g1(x)`.
pub const GRADIENT_STEP_FACTOR: f64 = 0.5;

/// Differentiable concave term.
pub trait SmoothTerm: Send + Sync {
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
}

/// Concave term with a computable proximity mapping.
pub trait ProxTerm: Send + Sync {
    fn value(&self, x: &[f64]) -> f64;
    fn prox(&self, x: &[f64], lambda: f64, warm: Option<&[f64]>) -> Result<ProxOutput>;
    fn strategy(&self) -> ProxStrategy;
}

pub fn prox_forward_backward<S, N>(
    x: &[f64],
    lambda: f64,
    smooth: &S,
    nonsmooth: &N,
    warm: Option<&[f64]>,
) -> Result<ProxOutput>
where
    S: SmoothTerm + ?Sized,
    N: ProxTerm + ?Sized,
{
    check_positive("lambda", lambda)?;
    let grad = smooth.gradient(x);
    check_len(x.len(), grad.len())?;
    let step = 2.0 * lambda * GRADIENT_STEP_FACTOR;
    let shifted: Vec<f64> = x.iter().zip(&grad).map(|(xi, gi)| xi + step * gi).collect();
    nonsmooth.prox(&shifted, lambda, warm)
}

/// `g ≡ 0` as a smooth term.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroSmooth;

impl SmoothTerm for ZeroSmooth {
    fn value(&self, _x: &[f64]) -> f64 {
        0.0
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        vec![0.0; x.len()]
    }
}

/// `g(x) = aᵀx`.
#[derive(Clone, Debug)]
pub struct AffineTerm {
    pub slope: Vec<f64>,
}

impl SmoothTerm for AffineTerm {
    fn value(&self, x: &[f64]) -> f64 {
        dot(&self.slope, x)
    }
    fn gradient(&self, _x: &[f64]) -> Vec<f64> {
        self.slope.clone()
    }
}

/// `g(x) = −γ‖x‖²`.
#[derive(Clone, Copy, Debug)]
pub struct SquaredNorm {
    pub gamma: f64,
}

impl SmoothTerm for SquaredNorm {
    fn value(&self, x: &[f64]) -> f64 {
        -self.gamma * norm_sq(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|v| -2.0 * self.gamma * v).collect()
    }
}

/// `g ≡ 0` as a prox term; its prox is the identity.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroProx;

impl ProxTerm for ZeroProx {
    fn value(&self, _x: &[f64]) -> f64 {
        0.0
    }
    fn prox(&self, x: &[f64], lambda: f64, _warm: Option<&[f64]>) -> Result<ProxOutput> {
        check_positive("lambda", lambda)?;
        Ok(ProxOutput::exact(x.to_vec()))
    }
    fn strategy(&self) -> ProxStrategy {
        ProxStrategy::ClosedForm(ClosedFormProx::Identity)
    }
}

/// `g(x) = −α‖x‖₁`.
#[derive(Clone, Copy, Debug)]
pub struct L1Norm {
    pub alpha: f64,
}

impl ProxTerm for L1Norm {
    fn value(&self, x: &[f64]) -> f64 {
        -self.alpha * x.iter().map(|v| v.abs()).sum::<f64>()
    }
    fn prox(&self, x: &[f64], lambda: f64, _warm: Option<&[f64]>) -> Result<ProxOutput> {
        Ok(ProxOutput::exact(prox_soft_threshold(
            x, lambda, self.alpha,
        )?))
    }
    fn strategy(&self) -> ProxStrategy {
        ProxStrategy::ClosedForm(ClosedFormProx::SoftThreshold)
    }
}

/// `g(x) = −α‖∇x‖₁` on a fixed image shape.
#[derive(Clone, Debug)]
pub struct TotalVariation {
    alpha: f64,
    op: DiscreteGradient,
    solver: TvSolver,
}

impl TotalVariation {
    pub fn new(rows: usize, cols: usize, alpha: f64, solver: TvSolver) -> Result<Self> {
        check_nonnegative("alpha", alpha)?;
        Ok(Self {
            alpha,
            op: DiscreteGradient::new(rows, cols)?,
            solver,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn solver(&self) -> &TvSolver {
        &self.solver
    }

    pub fn operator(&self) -> &DiscreteGradient {
        &self.op
    }
}

impl ProxTerm for TotalVariation {
    fn value(&self, x: &[f64]) -> f64 {
        -self.alpha * self.op.total_variation(x)
    }
    fn prox(&self, x: &[f64], lambda: f64, warm: Option<&[f64]>) -> Result<ProxOutput> {
        prox_tv(x, &self.op, lambda, self.alpha, &self.solver, warm)
    }
    fn strategy(&self) -> ProxStrategy {
        self.solver.strategy()
    }
}

/// Target `g = g1 + g2` whose prox is the forward-backward approximation.
///
/// [`Target::gradient`] returns `∇g1` only: the partial gradient used by
/// gradient-based baselines that ignore the non-smooth term.
#[derive(Clone, Debug)]
pub struct CompositeTarget<S, N> {
    dim: usize,
    pub smooth: S,
    pub nonsmooth: N,
}

impl<S: SmoothTerm, N: ProxTerm> CompositeTarget<S, N> {
    pub fn new(dim: usize, smooth: S, nonsmooth: N) -> Self {
        Self {
            dim,
            smooth,
            nonsmooth,
        }
    }
}

impl<S: SmoothTerm, N: ProxTerm> Target for CompositeTarget<S, N> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn log_density(&self, x: &[f64]) -> f64 {
        self.smooth.value(x) + self.nonsmooth.value(x)
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.smooth.gradient(x))
    }

    fn prox(&self, x: &[f64], lambda: f64, warm: Option<&[f64]>) -> Result<ProxOutput> {
        check_len(self.dim, x.len())?;
        prox_forward_backward(x, lambda, &self.smooth, &self.nonsmooth, warm)
    }

    fn prox_strategy(&self) -> ProxStrategy {
        ProxStrategy::ForwardBackwardSplit {
            nonsmooth: Box::new(self.nonsmooth.strategy()),
        }
    }
}
