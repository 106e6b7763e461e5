use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, check_positive, Error, Result};
use crate::prox::{
    prox_box_projection, prox_power_1d, prox_quadratic, prox_quartic_1d, prox_soft_threshold,
    ClosedFormProx, ProxOutput, ProxStrategy,
};
use crate::target::Target;

/// One-dimensional log-concave benchmark densities with tails `exp(−γ|x|^β)`,
/// plus the uniform box. Multi-dimensional targets are products of
/// independent copies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Benchmark1D {
    /// `−γ|x|`
    Laplace { gamma: f64 },
    /// `−γx²`; `γ = 1/2` is the standard normal.
    Gaussian { gamma: f64 },
    /// `−γx⁴`
    Quartic { gamma: f64 },
    /// `−γ|x|^β` for any `β ≥ 1`.
    PowerTail { beta: f64, gamma: f64 },
    /// Indicator of `[lo, hi]`.
    UniformBox { lo: f64, hi: f64 },
}

impl Benchmark1D {
    pub const LAPLACE: Self = Self::Laplace { gamma: 1.0 };
    pub const GAUSSIAN: Self = Self::Gaussian { gamma: 1.0 };
    pub const STANDARD_NORMAL: Self = Self::Gaussian { gamma: 0.5 };
    pub const QUARTIC: Self = Self::Quartic { gamma: 1.0 };
    pub const UNIFORM: Self = Self::UniformBox { lo: -1.0, hi: 1.0 };

    /// Tail exponent β, `None` for the box.
    pub fn beta(&self) -> Option<f64> {
        match *self {
            Self::Laplace { .. } => Some(1.0),
            Self::Gaussian { .. } => Some(2.0),
            Self::Quartic { .. } => Some(4.0),
            Self::PowerTail { beta, .. } => Some(beta),
            Self::UniformBox { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Laplace { gamma } | Self::Gaussian { gamma } | Self::Quartic { gamma } => {
                check_positive("gamma", gamma)
            }
            Self::PowerTail { beta, gamma } => {
                if !(beta >= 1.0) || !beta.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "tail exponent beta = {beta} < 1 is not log-concave"
                    )));
                }
                check_positive("gamma", gamma)
            }
            Self::UniformBox { lo, hi } => {
                if lo < hi && lo.is_finite() && hi.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!("empty box [{lo}, {hi}]")))
                }
            }
        }
    }

    /// Scalar log-density `g(x)`.
    pub fn log_density_1d(&self, x: f64) -> f64 {
        match *self {
            Self::Laplace { gamma } => -gamma * x.abs(),
            Self::Gaussian { gamma } => -gamma * x * x,
            Self::Quartic { gamma } => -gamma * x.powi(4),
            Self::PowerTail { beta, gamma } => -gamma * x.abs().powf(beta),
            Self::UniformBox { lo, hi } => {
                if (lo..=hi).contains(&x) {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }

    /// Scalar `g'(x)`; NaN where `g` is not differentiable.
    pub fn gradient_1d(&self, x: f64) -> f64 {
        match *self {
            Self::Laplace { gamma } => {
                if x == 0.0 {
                    f64::NAN
                } else {
                    -gamma * x.signum()
                }
            }
            Self::Gaussian { gamma } => -2.0 * gamma * x,
            Self::Quartic { gamma } => -4.0 * gamma * x.powi(3),
            Self::PowerTail { beta, gamma } => {
                if x == 0.0 {
                    if beta == 1.0 {
                        f64::NAN
                    } else {
                        0.0
                    }
                } else {
                    -gamma * beta * x.abs().powf(beta - 1.0) * x.signum()
                }
            }
            Self::UniformBox { lo, hi } => {
                if x > lo && x < hi {
                    0.0
                } else {
                    f64::NAN
                }
            }
        }
    }

    pub fn neg_hessian_1d(&self, x: f64) -> Option<f64> {
        match *self {
            Self::Laplace { .. } => (x != 0.0).then_some(0.0),
            Self::Gaussian { gamma } => Some(2.0 * gamma),
            Self::Quartic { gamma } => Some(12.0 * gamma * x * x),
            Self::PowerTail { beta, gamma } => {
                if x == 0.0 && beta < 2.0 {
                    None
                } else {
                    Some(gamma * beta * (beta - 1.0) * x.abs().powf(beta - 2.0))
                }
            }
            Self::UniformBox { lo, hi } => (x > lo && x < hi).then_some(0.0),
        }
    }

    /// Scalar `prox^λ_g(x)` through the closed forms in [`crate::prox`].
    pub fn prox_1d(&self, x: f64, lambda: f64) -> Result<f64> {
        Ok(match *self {
            Self::Laplace { gamma } => prox_soft_threshold(&[x], lambda, gamma)?[0],
            Self::Gaussian { gamma } => prox_quadratic(&[x], lambda, gamma)?[0],
            Self::Quartic { gamma } => prox_quartic_1d(x, gamma * lambda)?,
            Self::PowerTail { beta, gamma } => prox_power_1d(x, lambda, beta, gamma)?,
            Self::UniformBox { lo, hi } => {
                check_positive("lambda", lambda)?;
                prox_box_projection(&[x], &[lo], &[hi])?[0]
            }
        })
    }

    pub fn closed_form(&self) -> ClosedFormProx {
        match self {
            Self::Laplace { .. } => ClosedFormProx::SoftThreshold,
            Self::Gaussian { .. } => ClosedFormProx::Quadratic,
            Self::Quartic { .. } => ClosedFormProx::QuarticCubicRoot,
            Self::PowerTail { .. } => ClosedFormProx::PowerLaw,
            Self::UniformBox { .. } => ClosedFormProx::BoxProjection,
        }
    }

    /// A maximiser of `g` (the whole box maximises the uniform target; its
    /// midpoint is returned).
    pub fn mode(&self) -> f64 {
        match *self {
            Self::UniformBox { lo, hi } => 0.5 * (lo + hi),
            _ => 0.0,
        }
    }
}

impl fmt::Display for Benchmark1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Laplace { gamma: 1.0 } => f.write_str("laplace"),
            Self::Gaussian { gamma: 1.0 } => f.write_str("gaussian"),
            Self::Gaussian { gamma: 0.5 } => f.write_str("standard-normal"),
            Self::Quartic { gamma: 1.0 } => f.write_str("quartic"),
            Self::UniformBox { lo: -1.0, hi: 1.0 } => f.write_str("uniform"),
            Self::Laplace { gamma } => write!(f, "laplace:{gamma}"),
            Self::Gaussian { gamma } => write!(f, "gaussian:{gamma}"),
            Self::Quartic { gamma } => write!(f, "quartic:{gamma}"),
            Self::PowerTail { beta, gamma } => write!(f, "power:{beta}:{gamma}"),
            Self::UniformBox { lo, hi } => write!(f, "uniform:{lo}:{hi}"),
        }
    }
}

impl FromStr for Benchmark1D {
    type Err = Error;

    /// Accepts `laplace`, `gaussian`, `standard-normal`, `quartic`, `uniform`,
    /// optionally with `:γ` (or `:lo:hi` for the box), and `power:β:γ`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |i: usize| -> Result<f64> {
            parts[i]
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number '{}' in benchmark '{s}'", parts[i])))
        };
        let spec = match (parts[0], parts.len()) {
            ("laplace", 1) => Self::LAPLACE,
            ("laplace", 2) => Self::Laplace { gamma: num(1)? },
            ("gaussian", 1) => Self::GAUSSIAN,
            ("gaussian", 2) => Self::Gaussian { gamma: num(1)? },
            ("standard-normal", 1) => Self::STANDARD_NORMAL,
            ("quartic", 1) => Self::QUARTIC,
            ("quartic", 2) => Self::Quartic { gamma: num(1)? },
            ("power", 3) => Self::PowerTail {
                beta: num(1)?,
                gamma: num(2)?,
            },
            ("uniform", 1) => Self::UNIFORM,
            ("uniform", 3) => Self::UniformBox {
                lo: num(1)?,
                hi: num(2)?,
            },
            _ => return Err(Error::Parse(format!("unknown benchmark '{s}'"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Product of `dim` independent copies of a [`Benchmark1D`] density.
#[derive(Clone, Debug)]
pub struct BenchmarkTarget {
    spec: Benchmark1D,
    dim: usize,
}

pub fn benchmark_target(spec: Benchmark1D, dim: usize) -> Result<BenchmarkTarget> {
    spec.validate()?;
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    Ok(BenchmarkTarget { spec, dim })
}

impl BenchmarkTarget {
    pub fn spec(&self) -> Benchmark1D {
        self.spec
    }
}

impl Target for BenchmarkTarget {
    fn dim(&self) -> usize {
        self.dim
    }

    fn log_density(&self, x: &[f64]) -> f64 {
        x.iter().map(|&v| self.spec.log_density_1d(v)).sum()
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim, x.len())?;
        Ok(x.iter().map(|&v| self.spec.gradient_1d(v)).collect())
    }

    fn prox(&self, x: &[f64], lambda: f64, _warm: Option<&[f64]>) -> Result<ProxOutput> {
        check_len(self.dim, x.len())?;
        let point = x
            .iter()
            .map(|&v| self.spec.prox_1d(v, lambda))
            .collect::<Result<Vec<_>>>()?;
        Ok(ProxOutput::exact(point))
    }

    fn prox_strategy(&self) -> ProxStrategy {
        ProxStrategy::ClosedForm(self.spec.closed_form())
    }

    fn neg_hessian_1d(&self, x: f64) -> Option<f64> {
        (self.dim == 1)
            .then(|| self.spec.neg_hessian_1d(x))
            .flatten()
    }
}
