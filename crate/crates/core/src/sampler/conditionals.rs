//! Full-conditional draws in standard-normal-driven form.
//!
//! Every draw is an affine function of externally supplied standard normals, so the same
//! code serves both the production path (normals from the chain's stream) and the
//! shared-noise oracle tests.

use super::{ChainState, NoiseDraws};
use crate::error::{Error, Result};
use crate::model::{precisions_for, ModelSpec, PanelDataset};

/// Precomputed coefficients for one sweep, using the live variances in the chain state.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Kernel {
    pub inv_eps: f64,
    pub inv_alpha: f64,
    pub inv_tau: f64,
    pub phi: f64,
    pub t: f64,
    pub lambda_alpha: f64,
    pub lambda_mu_sa: f64,
    pub lambda_mu_aa: f64,
    pub sd_alpha: f64,
    pub sd_mu_sa: f64,
    pub sd_mu_aa: f64,
}

impl Kernel {
    pub fn new(state: &ChainState, data: &PanelDataset, spec: &ModelSpec) -> Result<Self> {
        let n = data.n_individuals();
        let t = data.n_periods();
        let p = precisions_for(
            state.sigma_eps_sq,
            state.sigma_alpha_sq,
            spec.tau_alpha_sq,
            n,
            t,
        )?;
        Ok(Self {
            inv_eps: 1.0 / state.sigma_eps_sq,
            inv_alpha: 1.0 / state.sigma_alpha_sq,
            inv_tau: 1.0 / spec.tau_alpha_sq,
            phi: spec.phi_alpha,
            t: t as f64,
            lambda_alpha: p.lambda_alpha,
            lambda_mu_sa: p.lambda_mu_sa,
            lambda_mu_aa: p.lambda_mu_aa,
            sd_alpha: p.lambda_alpha.sqrt().recip(),
            sd_mu_sa: p.lambda_mu_sa.sqrt().recip(),
            sd_mu_aa: p.lambda_mu_aa.sqrt().recip(),
        })
    }

    /// Fills `alpha` from `alpha_i | mu, D`; returns `sum_i alpha_i`.
    #[inline]
    pub fn fill_alpha(
        &self,
        sums: &[f64],
        mu: f64,
        alpha: &mut [f64],
        normal: &mut impl FnMut() -> f64,
    ) -> f64 {
        let prior_part = self.inv_alpha * mu;
        let mut total = 0.0;
        for (a, s) in alpha.iter_mut().zip(sums) {
            *a = (self.inv_eps * s + prior_part) / self.lambda_alpha + normal() * self.sd_alpha;
            total += *a;
        }
        total
    }

    /// Fills `alpha_tilde` from `alpha_tilde_i | mu, D`; returns `sum_i alpha_tilde_i`.
    #[inline]
    pub fn fill_alpha_tilde(
        &self,
        sums: &[f64],
        mu: f64,
        alpha_tilde: &mut [f64],
        normal: &mut impl FnMut() -> f64,
    ) -> f64 {
        let shift = self.t * mu;
        let mut total = 0.0;
        for (a, s) in alpha_tilde.iter_mut().zip(sums) {
            *a = self.inv_eps * (s - shift) / self.lambda_alpha + normal() * self.sd_alpha;
            total += *a;
        }
        total
    }

    /// `mu | alpha, D` given `sum_i alpha_i`.
    #[inline]
    pub fn mu_given_alpha(&self, sum_alpha: f64, z0: f64) -> f64 {
        (self.inv_alpha * sum_alpha + self.inv_tau * self.phi) / self.lambda_mu_sa
            + z0 * self.sd_mu_sa
    }

    /// `mu | alpha_tilde, D` given `sum_i sum_t y_it` and `sum_i alpha_tilde_i`.
    #[inline]
    pub fn mu_given_alpha_tilde(&self, total_y: f64, sum_alpha_tilde: f64, z0: f64) -> f64 {
        let residual_sum = total_y - self.t * sum_alpha_tilde;
        (self.inv_eps * residual_sum + self.inv_tau * self.phi) / self.lambda_mu_aa
            + z0 * self.sd_mu_aa
    }
}

pub(crate) fn check_noise(noise: &NoiseDraws, n: usize) -> Result<()> {
    if noise.z.len() == n {
        Ok(())
    } else {
        Err(Error::Dimension {
            what: "noise.z",
            expected: n,
            got: noise.z.len(),
        })
    }
}

pub(crate) fn check_state(state: &ChainState, data: &PanelDataset) -> Result<()> {
    let n = data.n_individuals();
    for (what, len) in [
        ("state.alpha", state.alpha.len()),
        ("state.alpha_tilde", state.alpha_tilde.len()),
    ] {
        if len != n {
            return Err(Error::Dimension {
                what,
                expected: n,
                got: len,
            });
        }
    }
    Ok(())
}

/// `alpha_i = [sigma_eps^-2 sum_t y_it + sigma_alpha^-2 mu] / lambda_alpha + z_i / sqrt(lambda_alpha)`.
pub fn draw_alpha_given_mu(
    state: &ChainState,
    data: &PanelDataset,
    spec: &ModelSpec,
    noise: &NoiseDraws,
) -> Result<Vec<f64>> {
    check_noise(noise, data.n_individuals())?;
    let k = Kernel::new(state, data, spec)?;
    let mut out = vec![0.0; data.n_individuals()];
    let mut z = noise.z.iter().copied();
    k.fill_alpha(data.individual_sums(), state.mu_alpha, &mut out, &mut || {
        z.next().unwrap_or_default()
    });
    Ok(out)
}

/// `mu = [sigma_alpha^-2 sum_i alpha_i + tau^-2 phi] / lambda_mu_sa + z0 / sqrt(lambda_mu_sa)`,
/// reading `alpha` from the state.
pub fn draw_mu_given_alpha(
    state: &ChainState,
    data: &PanelDataset,
    spec: &ModelSpec,
    z0: f64,
) -> Result<f64> {
    check_state(state, data)?;
    let k = Kernel::new(state, data, spec)?;
    Ok(k.mu_given_alpha(state.alpha.iter().sum(), z0))
}

/// `alpha_tilde_i = sigma_eps^-2 sum_t (y_it - mu) / lambda_alpha + z_i / sqrt(lambda_alpha)`.
pub fn draw_alpha_tilde_given_mu(
    state: &ChainState,
    data: &PanelDataset,
    spec: &ModelSpec,
    noise: &NoiseDraws,
) -> Result<Vec<f64>> {
    check_noise(noise, data.n_individuals())?;
    let k = Kernel::new(state, data, spec)?;
    let mut out = vec![0.0; data.n_individuals()];
    let mut z = noise.z.iter().copied();
    k.fill_alpha_tilde(data.individual_sums(), state.mu_alpha, &mut out, &mut || {
        z.next().unwrap_or_default()
    });
    Ok(out)
}

/// `mu = [sigma_eps^-2 sum_it (y_it - alpha_tilde_i) + tau^-2 phi] / lambda_mu_aa + z0 / sqrt(lambda_mu_aa)`,
/// reading `alpha_tilde` from the state.
pub fn draw_mu_given_alpha_tilde(
    state: &ChainState,
    data: &PanelDataset,
    spec: &ModelSpec,
    z0: f64,
) -> Result<f64> {
    check_state(state, data)?;
    let k = Kernel::new(state, data, spec)?;
    Ok(k.mu_given_alpha_tilde(data.total_sum(), state.alpha_tilde.iter().sum(), z0))
}
