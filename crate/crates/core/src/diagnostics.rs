//! Single-chain MCMC diagnostics: autocorrelation, batch-means Monte Carlo standard error
//! and effective sample size.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_MAX_LAG: usize = 50;

/// Name of the MCSE estimator, echoed into output metadata.
pub const MCSE_ESTIMATOR: &str = "batch means, floor(sqrt(R)) equal contiguous batches, remainder dropped";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    /// Autocorrelations at lags `0..=max_lag`; `acf[0] == 1`.
    pub acf: Vec<f64>,
    pub mcse: f64,
    pub ess: f64,
    pub n_draws: usize,
    pub burn_in: usize,
    pub mean: f64,
    pub sd: f64,
}

impl DiagnosticsReport {
    /// Diagnostics for post-burn-in `draws`. `max_lag` is clipped so that the chain is long
    /// enough for the ACF.
    pub fn from_chain(draws: &[f64], burn_in: usize, max_lag: usize) -> Result<Self> {
        if draws.len() < 4 {
            return Err(Error::ChainTooShort {
                len: draws.len(),
                needed: 4,
            });
        }
        let max_lag = max_lag.min(draws.len() - 2);
        let (mean, var) = mean_and_variance(draws);
        Ok(Self {
            acf: acf(draws, max_lag)?,
            mcse: mcse_batch_means(draws, None)?,
            ess: ess(draws)?,
            n_draws: draws.len(),
            burn_in,
            mean,
            sd: (var * draws.len() as f64 / (draws.len() - 1) as f64).sqrt(),
        })
    }
}

/// Mean and biased (1/n) variance.
fn mean_and_variance(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

/// Autocovariance at `lag` around `mean`, with the 1/n normalization.
fn autocovariance(x: &[f64], mean: f64, lag: usize) -> f64 {
    x.iter()
        .zip(&x[lag..])
        .map(|(a, b)| (a - mean) * (b - mean))
        .sum::<f64>()
        / x.len() as f64
}

/// Sample autocorrelation at lags `0..=max_lag`, mean-centered with the lag-0 denominator.
pub fn acf(chain: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    if chain.len() < max_lag + 2 {
        return Err(Error::ChainTooShort {
            len: chain.len(),
            needed: max_lag + 2,
        });
    }
    let (mean, var) = mean_and_variance(chain);
    if var <= 0.0 || !var.is_finite() {
        return Err(Error::ConstantChain);
    }
    let mut out = Vec::with_capacity(max_lag + 1);
    out.push(1.0);
    for lag in 1..=max_lag {
        out.push(autocovariance(chain, mean, lag) / var);
    }
    Ok(out)
}

/// Batch-means MCSE of the chain mean.
///
/// Splits the chain into `n_batches` contiguous batches of `len / n_batches` draws (default
/// `floor(sqrt(len))` batches), drops the remainder, and returns the standard deviation of
/// the batch means divided by `sqrt(n_batches)`.
pub fn mcse_batch_means(chain: &[f64], n_batches: Option<usize>) -> Result<f64> {
    let len = chain.len();
    let batches = n_batches.unwrap_or_else(|| (len as f64).sqrt().floor() as usize);
    if batches < 2 || len < 2 * batches {
        return Err(Error::ChainTooShort {
            len,
            needed: 2 * batches.max(2),
        });
    }
    let size = len / batches;
    let means: Vec<f64> = chain
        .chunks_exact(size)
        .take(batches)
        .map(|b| b.iter().sum::<f64>() / size as f64)
        .collect();
    let (_, var) = mean_and_variance(&means);
    let sample_var = var * batches as f64 / (batches - 1) as f64;
    if sample_var <= 0.0 {
        return Err(Error::ConstantChain);
    }
    Ok((sample_var / batches as f64).sqrt())
}

/// Effective sample size `R / (1 + 2 sum_k acf[k])`.
///
/// The sum runs from lag 1 up to and including the first lag whose autocorrelation is
/// non-positive. The autocorrelation time is floored at `1 / log10(R)`, which caps the ESS
/// of antithetic chains at `R log10(R)`.
pub fn ess(chain: &[f64]) -> Result<f64> {
    let len = chain.len();
    if len < 4 {
        return Err(Error::ChainTooShort { len, needed: 4 });
    }
    let (mean, var) = mean_and_variance(chain);
    if var <= 0.0 || !var.is_finite() {
        return Err(Error::ConstantChain);
    }
    let mut tau = 1.0;
    for lag in 1..len - 1 {
        let rho = autocovariance(chain, mean, lag) / var;
        tau += 2.0 * rho;
        if rho <= 0.0 {
            break;
        }
    }
    let floor = 1.0 / (len as f64).log10();
    Ok(len as f64 / tau.max(floor))
}
