//! Sample means with standard errors.

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;

/// Mean of a sampled quantity with its standard error.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    pub estimator: String,
}

impl EnsembleEstimate {
    /// `|mean − target|` in units of the standard error; infinite when the
    /// error is zero and the values differ.
    pub fn sigmas_from(&self, target: f64) -> f64 {
        let diff = (self.mean - target).abs();
        if diff == 0.0 {
            0.0
        } else if self.std_error == 0.0 {
            f64::INFINITY
        } else {
            diff / self.std_error
        }
    }

    /// Exact value (no sampling error).
    pub fn exact(mean: f64, samples: usize, estimator: impl Into<String>) -> Self {
        EnsembleEstimate { mean, std_error: 0.0, samples, estimator: estimator.into() }
    }
}

fn check(xs: &[f64]) -> Result<()> {
    if xs.len() < 2 {
        return Err(Error::Validation(format!("need at least 2 samples, got {}", xs.len())));
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::NumericalConsistency("non-finite sample".into()));
    }
    Ok(())
}

/// Sample mean with standard error `s/√n`.
pub fn mean_estimate(xs: &[f64], estimator: impl Into<String>) -> Result<EnsembleEstimate> {
    check(xs)?;
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean).powi(2)).collect();
    let var = pairwise_sum(&dev) / (n - 1.0);
    Ok(EnsembleEstimate { mean, std_error: (var / n).sqrt(), samples: xs.len(), estimator: estimator.into() })
}

/// Jackknife estimate of a statistic of the sample, with leave-one-out
/// standard error. `stat` receives the sample with one entry removed.
pub fn jackknife<F>(xs: &[f64], estimator: impl Into<String>, stat: F) -> Result<EnsembleEstimate>
where
    F: Fn(&[f64]) -> f64,
{
    check(xs)?;
    let n = xs.len();
    let full = stat(xs);
    let mut buf = Vec::with_capacity(n - 1);
    let loo: Vec<f64> = (0..n)
        .map(|i| {
            buf.clear();
            buf.extend(xs[..i].iter().chain(&xs[i + 1..]));
            stat(&buf)
        })
        .collect();
    let loo_mean = pairwise_sum(&loo) / n as f64;
    let dev: Vec<f64> = loo.iter().map(|x| (x - loo_mean).powi(2)).collect();
    let var = (n as f64 - 1.0) / n as f64 * pairwise_sum(&dev);
    // bias-corrected point estimate
    let mean = n as f64 * full - (n as f64 - 1.0) * loo_mean;
    Ok(EnsembleEstimate { mean, std_error: var.sqrt(), samples: n, estimator: estimator.into() })
}

/// Unbiased sample variance.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean).powi(2)).collect();
    pairwise_sum(&dev) / (n - 1.0)
}

/// Jackknife estimate of the variance of the sample (unbiased variance,
/// leave-one-out error). Computed in O(n) from running moments.
pub fn variance_estimate(xs: &[f64], estimator: impl Into<String>) -> Result<EnsembleEstimate> {
    check(xs)?;
    if xs.len() < 3 {
        return Err(Error::Validation("variance jackknife needs at least 3 samples".into()));
    }
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    let d: Vec<f64> = xs.iter().map(|x| x - mean).collect();
    let ss = pairwise_sum(&d.iter().map(|x| x * x).collect::<Vec<_>>());
    // leave-one-out: mean shifts by −d_i/(n−1); sum of squares drops by d_i²·n/(n−1)
    let loo: Vec<f64> = d.iter().map(|di| (ss - di * di * n / (n - 1.0)) / (n - 2.0)).collect();
    let loo_mean = pairwise_sum(&loo) / n;
    let dev: Vec<f64> = loo.iter().map(|x| (x - loo_mean).powi(2)).collect();
    let var_of_var = (n - 1.0) / n * pairwise_sum(&dev);
    Ok(EnsembleEstimate { mean: ss / (n - 1.0), std_error: var_of_var.sqrt(), samples: xs.len(), estimator: estimator.into() })
}
