//! Autocorrelation, effective sample size and marginal quantiles of stored
//! chains.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};
use crate::io::fmt_f64;

/// A scalar summary of each stored sample, such as its log-density.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarSummaryTrace {
    pub values: Vec<f64>,
    pub label: String,
}

impl ScalarSummaryTrace {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "trace value {i} is not finite"
            )));
        }
        Ok(Self {
            values,
            label: label.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Biased (`1/N`) autocovariance at lags `0..=max_lag`, by FFT.
fn autocovariance(values: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = values.len();
    if n == 0 {
        return Err(Error::InsufficientSamples {
            needed: 1,
            found: 0,
        });
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let size = (2 * n).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = values
        .iter()
        .map(|&v| Complex::new(v - mean, 0.0))
        .collect();
    buf.resize(size, Complex::new(0.0, 0.0));
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(size).process(&mut buf);
    for c in &mut buf {
        *c = Complex::new(c.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(size).process(&mut buf);
    let scale = 1.0 / (size as f64 * n as f64);
    Ok(buf[..=max_lag.min(n - 1)]
        .iter()
        .map(|c| c.re * scale)
        .collect())
}

/// Sample autocorrelation at lags `0..=max_lag` (lag 0 is 1).
pub fn autocorrelation(trace: &ScalarSummaryTrace, max_lag: usize) -> Result<Vec<f64>> {
    let n = trace.len();
    if n <= max_lag {
        return Err(Error::InsufficientSamples {
            needed: max_lag + 1,
            found: n,
        });
    }
    let acov = autocovariance(&trace.values, max_lag)?;
    let c0 = acov[0];
    let spread = trace
        .values
        .iter()
        .fold(0.0f64, |m, v| m.max((v - trace.values[0]).abs()));
    if !(c0 > 0.0) || spread == 0.0 {
        return Err(Error::DegenerateTrace("trace is constant"));
    }
    Ok(acov.iter().map(|c| c / c0).collect())
}

/// `N / τ` with `τ = −1 + 2 Σ_k Γ_k`, `Γ_k = ρ(2k) + ρ(2k+1)` summed over
/// Geyer's initial positive, monotone sequence.
///
/// `τ` is floored at `1/log₁₀ N`, which bounds the estimate for
/// antithetic chains at `N log₁₀ N`.
pub fn effective_sample_size(trace: &ScalarSummaryTrace) -> Result<f64> {
    let n = trace.len();
    if n < 100 {
        return Err(Error::InsufficientSamples {
            needed: 100,
            found: n,
        });
    }
    let rho = autocorrelation(trace, n - 1)?;
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    for k in 0..n / 2 {
        let pair = rho[2 * k] + rho[2 * k + 1];
        if pair <= 0.0 {
            break;
        }
        let pair = pair.min(prev);
        sum += pair;
        prev = pair;
    }
    let tau = (2.0 * sum - 1.0).max(1.0 / (n as f64).log10());
    Ok(n as f64 / tau)
}

/// ESS per second of wall-clock time.
pub fn time_normalized_ess(ess: f64, wall_time: f64) -> Result<f64> {
    check_positive("wall_time", wall_time)?;
    Ok(ess / wall_time)
}

/// Linear interpolation between order statistics at plotting positions
/// `(k − 1)/(N − 1)`. `sorted` must be non-empty and ascending.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Per-coordinate quantiles: `result[j][i]` is the `probs[j]` quantile of
/// coordinate `i`.
pub fn pixelwise_quantiles(samples: &[Vec<f64>], probs: &[f64]) -> Result<Vec<Vec<f64>>> {
    if samples.len() < 20 {
        return Err(Error::InsufficientSamples {
            needed: 20,
            found: samples.len(),
        });
    }
    if probs.iter().any(|p| !(0.0..=1.0).contains(p)) || probs.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter(
            "probabilities must be sorted and lie in [0, 1]".into(),
        ));
    }
    let dim = samples[0].len();
    if let Some(bad) = samples.iter().find(|s| s.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bad.len(),
        });
    }
    let mut out = vec![vec![0.0; dim]; probs.len()];
    let mut column = vec![0.0; samples.len()];
    for i in 0..dim {
        for (c, s) in column.iter_mut().zip(samples) {
            *c = s[i];
        }
        column.sort_by(f64::total_cmp);
        for (row, &p) in out.iter_mut().zip(probs) {
            row[i] = quantile_sorted(&column, p);
        }
    }
    Ok(out)
}

/// Marginal credibility intervals and their widths.
#[derive(Clone, Debug, PartialEq)]
pub struct CredibilityMap {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub width: Vec<f64>,
}

impl CredibilityMap {
    /// Interval between the `lo` and `hi` quantiles (5% and 95% give the 90%
    /// region).
    pub fn from_samples(samples: &[Vec<f64>], lo: f64, hi: f64) -> Result<Self> {
        let mut q = pixelwise_quantiles(samples, &[lo, hi])?;
        let upper = q.pop().unwrap_or_default();
        let lower = q.pop().unwrap_or_default();
        let width = lower
            .iter()
            .zip(&upper)
            .map(|(l, u)| (u - l).max(0.0))
            .collect();
        Ok(Self {
            lower,
            upper,
            width,
        })
    }
}

/// JSON summary of one scalar trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub label: String,
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub ess: f64,
    pub ess_per_sample: f64,
    pub acf_lag1: f64,
}

pub fn summarize_trace(trace: &ScalarSummaryTrace) -> Result<TraceSummary> {
    let n = trace.len();
    let ess = effective_sample_size(trace)?;
    let mean = trace.values.iter().sum::<f64>() / n as f64;
    let variance = trace.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    let acf = autocorrelation(trace, 1)?;
    Ok(TraceSummary {
        label: trace.label.clone(),
        n,
        mean,
        variance,
        ess,
        ess_per_sample: ess / n as f64,
        acf_lag1: acf[1],
    })
}

/// 1-Wasserstein distance between two equal-size empirical distributions.
pub fn wasserstein1(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::InsufficientSamples {
            needed: 1,
            found: 0,
        });
    }
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64)
}

/// `lag,acf` CSV with a header row.
pub fn acf_csv(acf: &[f64]) -> String {
    let mut s = String::from("lag,acf\n");
    for (k, v) in acf.iter().enumerate() {
        s.push_str(&format!("{k},{}\n", fmt_f64(*v)));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{chain_rng, standard_normal};

    fn ar1(rho: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = chain_rng(seed, 0);
        let mut x = 0.0;
        let s = (1.0 - rho * rho).sqrt();
        (0..n)
            .map(|_| {
                x = rho * x + s * standard_normal(&mut rng);
                x
            })
            .collect()
    }

    fn acf_direct(x: &[f64], max_lag: usize) -> Vec<f64> {
        let n = x.len();
        let m = x.iter().sum::<f64>() / n as f64;
        let c = |k: usize| (0..n - k).map(|t| (x[t] - m) * (x[t + k] - m)).sum::<f64>() / n as f64;
        let c0 = c(0);
        (0..=max_lag).map(|k| c(k) / c0).collect()
    }

    #[test]
    fn acf_starts_at_one_and_matches_double_loop() {
        let x = ar1(0.7, 5000, 2);
        let t = ScalarSummaryTrace::new("x", x.clone()).unwrap();
        let fast = autocorrelation(&t, 40).unwrap();
        assert_eq!(fast.len(), 41);
        assert!((fast[0] - 1.0).abs() < 1e-14);
        for (a, b) in fast.iter().zip(acf_direct(&x, 40)) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn acf_of_iid_and_ar1() {
        let iid = ScalarSummaryTrace::new("iid", ar1(0.0, 100_000, 3)).unwrap();
        assert!(autocorrelation(&iid, 1).unwrap()[1].abs() < 0.01);
        let ar = ScalarSummaryTrace::new("ar", ar1(0.5, 100_000, 4)).unwrap();
        assert!((autocorrelation(&ar, 2).unwrap()[2] - 0.25).abs() < 0.02);
    }

    #[test]
    fn constant_trace_is_degenerate() {
        let t = ScalarSummaryTrace::new("c", vec![2.0; 200]).unwrap();
        assert!(matches!(
            autocorrelation(&t, 5),
            Err(Error::DegenerateTrace(_))
        ));
        assert!(effective_sample_size(&t).is_err());
        assert!(ScalarSummaryTrace::new("nan", vec![f64::NAN]).is_err());
    }

    #[test]
    fn ess_examples() {
        let n = 100_000;
        let iid = ScalarSummaryTrace::new("iid", ar1(0.0, n, 5)).unwrap();
        let e = effective_sample_size(&iid).unwrap();
        assert!((0.9 * n as f64..=1.1 * n as f64).contains(&e), "{e}");
        let ar = ScalarSummaryTrace::new("ar", ar1(0.5, n, 6)).unwrap();
        let e = effective_sample_size(&ar).unwrap();
        assert!((e / (n as f64 / 3.0) - 1.0).abs() < 0.15, "{e}");
        let alt: Vec<f64> = (0..1000)
            .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let e = effective_sample_size(&ScalarSummaryTrace::new("alt", alt).unwrap()).unwrap();
        assert!(e >= 1000.0 && e.is_finite(), "{e}");
        let short = ScalarSummaryTrace::new("s", ar1(0.0, 99, 1)).unwrap();
        assert!(matches!(
            effective_sample_size(&short),
            Err(Error::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn quantile_examples() {
        let samples: Vec<Vec<f64>> = (1..=100).map(|k| vec![k as f64, 3.0]).collect();
        let map = CredibilityMap::from_samples(&samples, 0.05, 0.95).unwrap();
        assert!((map.lower[0] - 5.95).abs() < 1e-12);
        assert!((map.upper[0] - 95.05).abs() < 1e-12);
        assert!((map.width[0] - 89.1).abs() < 1e-12);
        assert_eq!(map.width[1], 0.0);
        assert!(pixelwise_quantiles(&samples[..19], &[0.5]).is_err());
    }

    #[test]
    fn normal_credibility_width() {
        let samples: Vec<Vec<f64>> = ar1(0.0, 100_000, 8).into_iter().map(|v| vec![v]).collect();
        let map = CredibilityMap::from_samples(&samples, 0.05, 0.95).unwrap();
        assert!((map.width[0] / (2.0 * 1.6449) - 1.0).abs() < 0.03);
    }

    #[test]
    fn time_normalisation() {
        assert!((time_normalized_ess(7930.0, 1140.0).unwrap() - 6.956).abs() < 1e-3);
        assert_eq!(time_normalized_ess(100.0, 10.0).unwrap(), 10.0);
        assert!(time_normalized_ess(1.0, 0.0).is_err());
    }

    #[test]
    fn acf_csv_has_header() {
        let s = acf_csv(&[1.0, 0.5]);
        assert!(s.starts_with("lag,acf\n0,"));
        assert_eq!(s.lines().count(), 3);
    }

    #[test]
    fn wasserstein_of_shifted_samples() {
        assert_eq!(
            wasserstein1(&[0.0, 1.0, 2.0], &[3.0, 1.0, 2.0]).unwrap(),
            1.0
        );
        assert_eq!(wasserstein1(&[5.0], &[5.0]).unwrap(), 0.0);
        assert!(wasserstein1(&[1.0], &[]).is_err());
    }
}
