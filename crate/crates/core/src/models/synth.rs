//! Synthetic truths, noisy observations and posterior predictive replicas.

use rand::Rng;

use crate::error::{check_nonnegative, check_positive, Error, Result};
use crate::linalg::{norm_sq, CircularConvolution, Grid, LinearOperator};
use crate::rng::standard_normal;

/// How the noise level of a synthetic observation is specified.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseSpec {
    Variance(f64),
    /// Blurred signal-to-noise ratio `10 log₁₀(var(Hx₀)/σ²)`.
    BsnrDb(f64),
    /// Signal-to-noise ratio `10 log₁₀(‖x₀‖²/(n σ²))`.
    SnrDb(f64),
}

impl NoiseSpec {
    /// Noise variance implied for the clean signal `hx` (`Hx₀`, or `x₀`
    /// without blur).
    pub fn variance_for(&self, hx: &Grid) -> Result<f64> {
        match *self {
            NoiseSpec::Variance(s2) => {
                check_nonnegative("sigma2", s2)?;
                Ok(s2)
            }
            NoiseSpec::BsnrDb(db) => {
                let v = hx.variance();
                if !(v > 0.0) {
                    return Err(Error::InvalidParameter(
                        "BSNR needs a blurred truth with non-zero variance".into(),
                    ));
                }
                Ok(v * 10f64.powf(-db / 10.0))
            }
            NoiseSpec::SnrDb(db) => {
                let power = norm_sq(hx.as_slice()) / hx.len() as f64;
                if !(power > 0.0) {
                    return Err(Error::InvalidParameter("SNR needs a non-zero truth".into()));
                }
                Ok(power * 10f64.powf(-db / 10.0))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Observation {
    pub y: Grid,
    /// Noise-free signal `Hx₀`.
    pub clean: Grid,
    pub sigma2: f64,
}

/// `y = Hx₀ + w` with `w ~ N(0, σ²I)`; `H` is the identity when no kernel is
/// given.
pub fn synthesize_observation<R: Rng + ?Sized>(
    truth: &Grid,
    kernel: Option<&Grid>,
    noise: NoiseSpec,
    rng: &mut R,
) -> Result<Observation> {
    let clean = match kernel {
        Some(k) => {
            let op = CircularConvolution::new(k, truth.rows(), truth.cols())?;
            truth.with_data(op.apply(truth.as_slice()))?
        }
        None => truth.clone(),
    };
    let sigma2 = noise.variance_for(&clean)?;
    let sd = sigma2.sqrt();
    let data = clean
        .as_slice()
        .iter()
        .map(|&v| {
            if sd > 0.0 {
                v + sd * standard_normal(rng)
            } else {
                v
            }
        })
        .collect();
    Ok(Observation {
        y: clean.with_data(data)?,
        clean,
        sigma2,
    })
}

/// SNR in dB of `truth` under noise variance `sigma2`.
pub fn snr_db(truth: &Grid, sigma2: f64) -> Result<f64> {
    check_positive("sigma2", sigma2)?;
    Ok(10.0 * (norm_sq(truth.as_slice()) / (truth.len() as f64 * sigma2)).log10())
}

/// Rank-2 checkerboard of `tiles × tiles` squares of side `square`.
///
/// Dark squares are 0; light squares are 1 on the left half and 0.5 on the
/// right half.
pub fn checkerboard(square: usize, tiles: usize) -> Grid {
    let n = square * tiles;
    Grid::from_fn(n, n, |r, c| {
        let light = (r / square + c / square).is_multiple_of(2);
        match (light, c < n / 2) {
            (false, _) => 0.0,
            (true, true) => 1.0,
            (true, false) => 0.5,
        }
    })
}

/// Piecewise-constant grey-level test image on `[0, 255]`: background, a
/// bright rectangle, a disk, a ring, thin bars and small squares.
pub fn phantom(size: usize) -> Grid {
    let s = size as f64;
    Grid::from_fn(size, size, |r, c| {
        let (y, x) = ((r as f64 + 0.5) / s, (c as f64 + 0.5) / s);
        let d_disk = ((x - 0.65).powi(2) + (y - 0.35).powi(2)).sqrt();
        let d_ring = ((x - 0.3).powi(2) + (y - 0.7).powi(2)).sqrt();
        if d_disk < 0.18 {
            if d_disk < 0.07 {
                40.0
            } else {
                210.0
            }
        } else if (0.12..0.2).contains(&d_ring) {
            170.0
        } else if (0.1..0.42).contains(&x) && (0.1..0.38).contains(&y) {
            240.0
        } else if (0.55..0.9).contains(&x) && (0.62..0.9).contains(&y) {
            if (c * 8 / size).is_multiple_of(2) {
                120.0
            } else {
                80.0
            }
        } else if (0.45..0.5).contains(&x) {
            150.0
        } else {
            20.0
        }
    })
}

/// Replicas `Y_rep ~ N(X⁽ᵗ⁾, σ²I)` for the stored samples at `indices`.
pub fn posterior_predictive_replicas<R: Rng + ?Sized>(
    samples: &[Vec<f64>],
    indices: &[usize],
    shape: (usize, usize),
    sigma2: f64,
    rng: &mut R,
) -> Result<Vec<Grid>> {
    check_nonnegative("sigma2", sigma2)?;
    let sd = sigma2.sqrt();
    indices
        .iter()
        .map(|&t| {
            let x = samples.get(t).ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "replica index {t} out of range for {} samples",
                    samples.len()
                ))
            })?;
            let data = x
                .iter()
                .map(|&v| {
                    if sd > 0.0 {
                        v + sd * standard_normal(rng)
                    } else {
                        v
                    }
                })
                .collect();
            Grid::new(shape.0, shape.1, data)
        })
        .collect()
}
