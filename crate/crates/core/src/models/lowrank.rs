use crate::error::{check_len, check_positive, Result};
use crate::linalg::{dist_sq, nuclear_norm, svd, Grid};
use crate::prox::{prox_nuclear_svt, ClosedFormProx, ProxOutput, ProxStrategy};
use crate::target::Target;

/// Noisy matrix `y = x + w` with a nuclear-norm prior:
/// `log π(x|y) = −‖y − x‖²/2σ² − α‖x‖_* + const`.
#[derive(Clone, Debug)]
pub struct LowRankDenoiseModel {
    pub y: Grid,
    pub sigma2: f64,
    pub alpha: f64,
}

impl LowRankDenoiseModel {
    pub fn validate(&self) -> Result<()> {
        check_positive("sigma2", self.sigma2)?;
        check_positive("alpha", self.alpha)
    }

    /// MAP estimate `SVT(y, ασ²)`.
    pub fn map_estimate(&self) -> Result<Grid> {
        prox_nuclear_svt(&self.y, self.alpha * self.sigma2)
    }
}

#[derive(Clone, Debug)]
pub struct LowRankTarget {
    model: LowRankDenoiseModel,
}

pub fn lowrank_target(model: &LowRankDenoiseModel) -> Result<LowRankTarget> {
    model.validate()?;
    Ok(LowRankTarget {
        model: model.clone(),
    })
}

impl LowRankTarget {
    pub fn model(&self) -> &LowRankDenoiseModel {
        &self.model
    }

    fn grid(&self, x: &[f64]) -> Result<Grid> {
        self.model.y.with_data(x.to_vec())
    }

    /// Blend and threshold of the exact prox: `prox^λ_g(x) = SVT(b, τ)` with
    /// `b = (λy + σ²x)/(λ + σ²)` and `τ = αλσ²/(λ + σ²)`.
    pub fn prox_parts(&self, x: &[f64], lambda: f64) -> Result<(Grid, f64)> {
        check_positive("lambda", lambda)?;
        check_len(self.model.y.len(), x.len())?;
        let s2 = self.model.sigma2;
        let denom = lambda + s2;
        let blend: Vec<f64> = self
            .model
            .y
            .as_slice()
            .iter()
            .zip(x)
            .map(|(&y, &xi)| (lambda * y + s2 * xi) / denom)
            .collect();
        Ok((self.grid(&blend)?, self.model.alpha * lambda * s2 / denom))
    }
}

impl Target for LowRankTarget {
    fn dim(&self) -> usize {
        self.model.y.len()
    }

    fn log_density(&self, x: &[f64]) -> f64 {
        if x.len() != self.dim() || x.iter().any(|v| !v.is_finite()) {
            return f64::NEG_INFINITY;
        }
        let fit = dist_sq(self.model.y.as_slice(), x) / (2.0 * self.model.sigma2);
        match self.grid(x).and_then(|g| nuclear_norm(&g)) {
            Ok(nn) => -fit - self.model.alpha * nn,
            Err(_) => f64::NEG_INFINITY,
        }
    }

    /// `(y − x)/σ² − α U Vᵀ`, the gradient wherever `x` has full rank.
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), x.len())?;
        let dec = svd(&self.grid(x)?)?;
        let ones = vec![1.0; dec.singular_values.len()];
        let uv = dec.recompose(&ones);
        Ok(self
            .model
            .y
            .as_slice()
            .iter()
            .zip(x)
            .zip(uv.as_slice())
            .map(|((&y, &xi), &d)| (y - xi) / self.model.sigma2 - self.model.alpha * d)
            .collect())
    }

    fn prox(&self, x: &[f64], lambda: f64, _warm: Option<&[f64]>) -> Result<ProxOutput> {
        let (blend, tau) = self.prox_parts(x, lambda)?;
        Ok(ProxOutput::exact(prox_nuclear_svt(&blend, tau)?.into_vec()))
    }

    fn prox_strategy(&self) -> ProxStrategy {
        ProxStrategy::ClosedForm(ClosedFormProx::SingularValueThreshold)
    }
}
