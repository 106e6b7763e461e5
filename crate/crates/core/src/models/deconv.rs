use crate::error::{check_len, check_positive, Error, Result};
use crate::linalg::{CircularConvolution, Grid, LinearOperator};
use crate::prox::TvSolver;
use crate::splitting::{CompositeTarget, SmoothTerm, TotalVariation};

/// Blurred, noisy image `y = Hx + w` with a total-variation prior:
/// `log π(x|y) = −‖y − Hx‖²/2σ² − α‖∇x‖₁ + const`.
///
/// `H` is circular convolution with `kernel`.
#[derive(Clone, Debug)]
pub struct ImageDeconvModel {
    pub y: Grid,
    pub kernel: Grid,
    pub sigma2: f64,
    pub alpha: f64,
    pub tv: TvSolver,
}

impl ImageDeconvModel {
    pub fn validate(&self) -> Result<()> {
        check_positive("sigma2", self.sigma2)?;
        check_positive("alpha", self.alpha)?;
        let mass: f64 = self.kernel.as_slice().iter().sum();
        if (mass - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "blur kernel must sum to 1, sums to {mass}"
            )));
        }
        if self.kernel.rows() > self.y.rows() || self.kernel.cols() > self.y.cols() {
            return Err(Error::DimensionMismatch {
                expected: self.y.len(),
                found: self.kernel.len(),
            });
        }
        Ok(())
    }
}

/// Smooth data-fidelity term `−‖y − Hx‖²/2σ²`.
#[derive(Clone, Debug)]
pub struct GaussianLikelihood {
    y: Vec<f64>,
    op: CircularConvolution,
    sigma2: f64,
}

impl GaussianLikelihood {
    pub fn new(y: Vec<f64>, op: CircularConvolution, sigma2: f64) -> Result<Self> {
        check_positive("sigma2", sigma2)?;
        check_len(op.output_len(), y.len())?;
        Ok(Self { y, op, sigma2 })
    }

    pub fn operator(&self) -> &CircularConvolution {
        &self.op
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        let hx = self.op.apply(x);
        self.y.iter().zip(hx).map(|(y, h)| y - h).collect()
    }
}

impl SmoothTerm for GaussianLikelihood {
    fn value(&self, x: &[f64]) -> f64 {
        let r = self.residual(x);
        -r.iter().map(|v| v * v).sum::<f64>() / (2.0 * self.sigma2)
    }

    /// `Hᵀ(y − Hx)/σ²`
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let r = self.residual(x);
        self.op
            .apply_adjoint(&r)
            .into_iter()
            .map(|v| v / self.sigma2)
            .collect()
    }
}

pub type DeconvTarget = CompositeTarget<GaussianLikelihood, TotalVariation>;

/// Posterior target with the forward-backward prox (TV prox after a gradient
/// step on the likelihood).
pub fn deconv_target(model: &ImageDeconvModel) -> Result<DeconvTarget> {
    model.validate()?;
    let (rows, cols) = model.y.shape();
    let op = CircularConvolution::new(&model.kernel, rows, cols)?;
    let lik = GaussianLikelihood::new(model.y.as_slice().to_vec(), op, model.sigma2)?;
    let tv = TotalVariation::new(rows, cols, model.alpha, model.tv)?;
    Ok(CompositeTarget::new(rows * cols, lik, tv))
}
